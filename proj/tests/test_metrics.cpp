#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "mkv/error.hpp"
#include "mkv/metrics.hpp"
#include "mkv/transport.hpp"

using namespace mkv;

namespace {

// sup over node pairs (s, u) in [lo, hi]^2 with |s - u| <= w of |x(s) - y(u)|, by brute force.
double window_brute(const PathView& x, const PathView& y, std::size_t lo, std::size_t hi, std::size_t w) {
  double best = 0.0;
  for (std::size_t s = lo; s <= hi; ++s) {
    for (std::size_t u = lo; u <= hi; ++u) {
      const std::size_t gap = s > u ? s - u : u - s;
      if (gap <= w) best = std::max(best, std::abs(x[s] - y[u]));
    }
  }
  return best;
}

ParticleCloud single(const GridPtr& g, std::vector<double> path, double w) {
  return ParticleCloud(g, 1, std::move(path), {w});
}

}  // namespace

TEST_CASE("sup plus euclid distance by hand") {
  const auto g = make_time_grid(0.5, 1.0, 0.5);
  const std::vector<double> x{0, 0, 0, 0}, y{3, 1, 2, 10};
  const std::vector<double> wx{1.0}, wy{-1.0};
  const PathView px(*g, x), py(*g, y);
  CHECK(dist_t(px, wx, py, wy, 1.0, SupPlusEuclid{}) == 12.0);
  CHECK(dist_t(px, wx, py, wy, 0.5, SupPlusEuclid{}) == 5.0);
  CHECK(dist_t(px, wx, py, wy, 0.0, SupPlusEuclid{}) == 5.0);
}

TEST_CASE("windowed distance against brute force") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  testing::Gen gen(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto x = gen.walk(g->size(), 0.2), y = gen.walk(g->size(), 0.2);
    const std::vector<double> wx{gen.uniform(-1, 1)}, wy{gen.uniform(-1, 1)};
    const double K = gen.uniform(0.0, 0.5);
    const double t = g->node(g->zero_index() + gen.index(g->future_steps() + 1));
    const PathView px(*g, x), py(*g, y);
    const double dw = std::abs(wx[0] - wy[0]);
    const auto w = static_cast<std::size_t>(std::ceil(K * dw / g->dt() - 1e-12));
    const double s = window_brute(px, py, g->zero_index(), restrict_index(*g, t), w);
    CHECK(dist_t(px, wx, py, wy, t, kuramoto_window(K)) == doctest::Approx(std::sqrt(dw * dw + s * s)).epsilon(1e-12));
  }
}

TEST_CASE("distance is a metric on random paths") {
  const auto g = make_time_grid(0.1, 1.0, 0.1);
  testing::Gen gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> p{gen.walk(g->size(), 0.3), gen.walk(g->size(), 0.3), gen.walk(g->size(), 0.3)};
    std::vector<std::vector<double>> w{{gen.uniform(-1, 1)}, {gen.uniform(-1, 1)}, {gen.uniform(-1, 1)}};
    const double t = gen.uniform(0.0, 1.0);
    auto d = [&](int i, int j) { return dist_t(PathView(*g, p[i]), w[i], PathView(*g, p[j]), w[j], t, SupPlusEuclid{}); };
    CHECK(d(0, 0) == 0.0);
    CHECK(d(0, 1) == d(1, 0));
    CHECK(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
  }
}

TEST_CASE("two point masses at distance r give 2r/(2+r)") {
  const auto g = make_time_grid(0.0, 1.0, 0.5);
  for (double r : {0.01, 0.3, 1.0, 2.0, 5.0, 40.0}) {
    const auto a = single(g, {0, 0, 0}, 0.0);
    const auto b = single(g, {0, r, 0}, 0.0);
    const auto res = bl_distance_exact(a, b, 1.0, SupPlusEuclid{});
    CHECK(res.value == doctest::Approx(2.0 * r / (2.0 + r)).epsilon(1e-9));
    REQUIRE(res.certificate);
    const auto chk = check_certificate(a, b, 1.0, SupPlusEuclid{}, *res.certificate);
    CHECK(chk.feasible());
    CHECK(chk.objective == doctest::Approx(res.value).epsilon(1e-9));
  }
}

TEST_CASE("exact BL matches a dense simplex oracle") {
  const auto g = make_time_grid(0.1, 1.0, 0.1);
  testing::Gen gen(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t na = 1 + gen.index(4), nb = 1 + gen.index(4);
    const auto a = testing::random_cloud(g, na, gen, 0.3);
    const auto b = testing::random_cloud(g, nb, gen, 0.3);
    const double t = gen.uniform(0.0, 1.0);
    const MetricKind kind = trial % 2 ? MetricKind{SupPlusEuclid{}} : kuramoto_window(0.3);
    const auto res = bl_distance_exact(a, b, t, kind);
    const double oracle = testing::bl_oracle(na, nb, support_distances(a, b, t, kind));
    CHECK(res.value == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(res.value <= res.upper_bound + 1e-9);
    REQUIRE(res.certificate);
    const auto chk = check_certificate(a, b, t, kind, *res.certificate);
    CHECK(chk.feasible(1e-8));
    CHECK(chk.objective == doctest::Approx(res.value).epsilon(1e-8));
  }
}

TEST_CASE("BL distance properties") {
  const auto g = make_time_grid(0.0, 1.0, 0.1);
  testing::Gen gen(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testing::random_cloud(g, 6, gen);
    const auto b = testing::random_cloud(g, 6, gen);
    const auto c = testing::random_cloud(g, 6, gen);
    const auto ab = bl_distance_exact(a, b, 1.0, SupPlusEuclid{}).value;
    CHECK(bl_distance_exact(a, a, 1.0, SupPlusEuclid{}).value == doctest::Approx(0.0));
    CHECK(bl_distance_exact(b, a, 1.0, SupPlusEuclid{}).value == doctest::Approx(ab).epsilon(1e-9));
    CHECK(ab <= bl_distance_exact(a, c, 1.0, SupPlusEuclid{}).value +
                    bl_distance_exact(c, b, 1.0, SupPlusEuclid{}).value + 1e-9);
    CHECK(ab <= coupling_upper_bound(a, b, 1.0, SupPlusEuclid{}) + 1e-9);
    CHECK(bl_distance_exact(a, b, 0.5, SupPlusEuclid{}).value <= ab + 1e-9);
    CHECK(ab <= 2.0);
    const auto dict = bl_distance_dictionary(a, b, 1.0, SupPlusEuclid{}, 32, RngStream{1, 0, 0, Purpose::Dictionary});
    CHECK(dict.mode == BlMode::DictionaryLowerBound);
    CHECK(dict.value <= ab + 1e-9);
    const auto bigger = bl_distance_dictionary(a, b, 1.0, SupPlusEuclid{}, 64, RngStream{1, 0, 0, Purpose::Dictionary});
    CHECK(bigger.value >= dict.value);
  }
}

TEST_CASE("exact BL enforces the support cap") {
  const auto g = make_time_grid(0.0, 1.0, 0.5);
  testing::Gen gen(41);
  const auto a = testing::random_cloud(g, 5, gen), b = testing::random_cloud(g, 5, gen);
  BlOptions opt;
  opt.lp_cap = 8;
  CHECK_THROWS_AS(bl_distance_exact(a, b, 1.0, SupPlusEuclid{}, opt), Error);
  const auto fallback = bl_distance(a, b, 1.0, SupPlusEuclid{}, opt, 16, RngStream{});
  CHECK(fallback.mode == BlMode::DictionaryLowerBound);
}

TEST_CASE("coupling terms are truncated at two") {
  const auto g = make_time_grid(0.0, 1.0, 0.5);
  const auto a = single(g, {0, 0, 0}, 0.0), b = single(g, {0, 9, 0}, 0.0);
  CHECK(coupling_terms(a, b, 1.0, SupPlusEuclid{}) == std::vector<double>{2.0});
  CHECK(coupling_upper_bound(a, b, 0.0, SupPlusEuclid{}) == 0.0);
}

TEST_CASE("hungarian matches brute force") {
  testing::Gen gen(43);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + gen.index(6);
    std::vector<double> c(n * n);
    for (auto& v : c) v = gen.uniform(0.0, 3.0);
    const auto plan = solve_assignment(n, c);
    CHECK(plan.cost == doctest::Approx(testing::brute_assignment(n, c) / n).epsilon(1e-12));
    CHECK(plan.entries.size() == n);
  }
}

TEST_CASE("successive shortest paths matches a replicated assignment") {
  testing::Gen gen(47);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + gen.index(3), m = 1 + gen.index(3);
    std::vector<double> c(n * m);
    for (auto& v : c) v = gen.uniform(0.0, 2.0);
    const auto plan = solve_transport_ssp(n, m, c);
    // Split each row into m copies and each column into n copies: a square problem of size n*m.
    const std::size_t s = n * m;
    std::vector<double> sq(s * s);
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < s; ++j) sq[i * s + j] = c[(i / m) * m + (j / n)];
    }
    CHECK(plan.cost == doctest::Approx(testing::brute_assignment(s, sq) / s).epsilon(1e-9));
    std::vector<double> rows(n, 0.0), cols(m, 0.0);
    for (const auto& e : plan.entries) {
      rows[e.row] += e.mass;
      cols[e.col] += e.mass;
    }
    for (double r : rows) CHECK(r == doctest::Approx(1.0 / n));
    for (double q : cols) CHECK(q == doctest::Approx(1.0 / m));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) CHECK(plan.row_potential[i] + plan.col_potential[j] <= c[i * m + j] + 1e-9);
    }
  }
}

TEST_CASE("hungarian and ssp agree on square problems") {
  testing::Gen gen(53);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + gen.index(20);
    std::vector<double> c(n * n);
    for (auto& v : c) v = gen.uniform(0.0, 1.0);
    CHECK(solve_assignment(n, c).cost == doctest::Approx(solve_transport_ssp(n, n, c).cost).epsilon(1e-10));
  }
}

TEST_CASE("support distances and the LP dump") {
  const auto g = make_time_grid(0.0, 1.0, 0.5);
  testing::Gen gen(59);
  const auto a = testing::random_cloud(g, 2, gen), b = testing::random_cloud(g, 1, gen);
  const auto d = support_distances(a, b, 1.0, SupPlusEuclid{});
  REQUIRE(d.size() == 9);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(d[i * 3 + i] == 0.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(d[i * 3 + j] == d[j * 3 + i]);
  }
  std::ostringstream out;
  write_lp_table(out, a, b, 1.0, SupPlusEuclid{});
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') >= 1 + 6 + 6 + 1);
}

TEST_CASE("clouds on different grids are rejected") {
  testing::Gen gen(61);
  const auto a = testing::random_cloud(make_time_grid(0.0, 1.0, 0.5), 2, gen);
  const auto b = testing::random_cloud(make_time_grid(0.0, 1.0, 0.25), 2, gen);
  CHECK_THROWS_AS(bl_distance_exact(a, b, 1.0, SupPlusEuclid{}), Error);
}
