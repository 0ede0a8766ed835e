#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mkv/parallel.hpp"
#include "mkv/simulate.hpp"

using namespace mkv;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments terminal_moments(const ParticleCloud& c) {
  Moments m;
  const std::size_t k = c.grid().last_index();
  for (std::size_t i = 0; i < c.size(); ++i) m.mean += c.path(i)[k];
  m.mean /= static_cast<double>(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) m.var += std::pow(c.path(i)[k] - m.mean, 2);
  m.var /= static_cast<double>(c.size() - 1);
  return m;
}

ModelSpec kuramoto(double tau = 0.2) {
  KuramotoParams p;
  p.coupling = 0.5;
  p.media_gain = 1.0;
  p.delay_base = 0.1;
  return make_kuramoto_model(p, testing::common(tau, 1.0, BrownianSegmentInit{0.0, 0.5}, DiscreteMedia{{{-0.5}, {0.5}}}));
}

}  // namespace

TEST_CASE("reference paths have variance h^2 T and zero mean") {
  const auto g = make_time_grid(0.0, 1.0, 0.01);
  const auto model = make_zero_model(testing::common(0.0, 1.0, ConstantInit{0.0}, PointMassMedia{{0.0}}, Diffusion{1.5, 0.0}));
  const std::size_t m = 4000;
  const auto c = simulate_reference(model, m, g, RngStream{3});
  const auto mo = terminal_moments(c);
  CHECK(std::abs(mo.mean) < 5.0 * 1.5 / std::sqrt(m));
  CHECK(std::abs(mo.var - 2.25) < 5.0 * 2.25 * std::sqrt(2.0 / m));
}

TEST_CASE("constant drift shifts every path by c t") {
  const auto g = make_time_grid(0.1, 1.0, 0.01);
  const auto model = make_constant_model(0.75, testing::common(0.1, 1.0, UniformLevelInit{-1.0, 1.0}));
  const auto bank = NoiseBank::generate(model, 200, g, RngStream{4});
  const auto ref = simulate_reference(model, bank);
  const auto dec = simulate_decoupled(model, ref, bank);
  const auto cou = simulate_coupled(model, bank);
  CHECK(dec == cou);
  for (std::size_t i = 0; i < dec.size(); ++i) {
    for (std::size_t k = g->zero_index(); k < g->size(); ++k) {
      REQUIRE(dec.path(i)[k] - ref.path(i)[k] == doctest::Approx(0.75 * g->node(k)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("zero drift decoupled equals the reference bit for bit") {
  const auto g = make_time_grid(0.2, 1.0, 0.02);
  const auto model = make_zero_model(testing::common(0.2, 1.0, BrownianSegmentInit{1.0, 0.3}, UniformBoxMedia{{-1.0}, {1.0}},
                                                     Diffusion{1.0, 0.5}));
  const auto bank = NoiseBank::generate(model, 100, g, RngStream{5});
  const auto ref = simulate_reference(model, bank);
  CHECK(simulate_decoupled(model, ref, bank) == ref);
  CHECK(simulate_coupled(model, bank) == ref);
}

TEST_CASE("initial segments and media come from the bank unchanged") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = kuramoto();
  const auto bank = NoiseBank::generate(model, 30, g, RngStream{6});
  const auto c = simulate_coupled(model, bank);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto init = bank.initial_of(i);
    for (std::size_t k = 0; k <= g->zero_index(); ++k) CHECK(c.path(i)[k] == init[k]);
    CHECK(c.media(i)[0] == bank.media_of(i)[0]);
  }
}

TEST_CASE("a single coupled particle follows hand-rolled Euler with self interaction") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = kuramoto();
  const auto bank = NoiseBank::generate(model, 1, g, RngStream{7});
  const auto c = simulate_coupled(model, bank);
  std::vector<double> x(g->size());
  const auto init = bank.initial_of(0);
  std::copy(init.begin(), init.end(), x.begin());
  const double w = bank.media_of(0)[0];
  const auto db = bank.increments_of(0);
  for (std::size_t k = g->zero_index(); k < g->last_index(); ++k) {
    const double f = 0.5 * std::sin(x[k] - x[k - 2]) + 1.0 * w;  // delay 0.1 = 2 steps
    x[k + 1] = x[k] + f * g->dt() + 1.0 * db[k - g->zero_index()];
  }
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(c.path(0)[k] == doctest::Approx(x[k]).epsilon(1e-13));
}

TEST_CASE("coupled cloud is a fixed point of its own decoupled replay") {
  // The drift reads the cloud only up to the current node, so replaying against the
  // finished cloud reproduces it exactly.
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto model = kuramoto();
    const auto bank = NoiseBank::generate(model, 40, g, RngStream{seed});
    const auto c = simulate_coupled(model, bank);
    CHECK(simulate_decoupled(model, c, bank) == c);
  }
}

TEST_CASE("noise banks are reproducible and prefix stable") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = kuramoto();
  const auto a = NoiseBank::generate(model, 50, g, RngStream{8});
  const auto b = NoiseBank::generate(model, 50, g, RngStream{8});
  const auto small = NoiseBank::generate(model, 20, g, RngStream{8});
  CHECK(a.increments == b.increments);
  CHECK(a.initial == b.initial);
  CHECK(a.media == b.media);
  for (std::size_t i = 0; i < small.count; ++i) {
    const auto x = a.increments_of(i), y = small.increments_of(i);
    CHECK(std::equal(x.begin(), x.end(), y.begin()));
  }
  const auto other = NoiseBank::generate(model, 50, g, RngStream{9});
  CHECK(other.increments != a.increments);
}

TEST_CASE("increments are centred with variance dt") {
  const auto g = make_time_grid(0.0, 1.0, 0.01);
  const auto model = make_zero_model(testing::common(0.0, 1.0));
  const auto bank = NoiseBank::generate(model, 500, g, RngStream{10});
  double s = 0.0, s2 = 0.0;
  for (double v : bank.increments) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(bank.increments.size());
  CHECK(std::abs(s / n) < 5.0 * std::sqrt(0.01 / n));
  CHECK(std::abs(s2 / n - 0.01) < 5.0 * 0.01 * std::sqrt(2.0 / n));
}

TEST_CASE("simulation does not depend on the thread count") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = kuramoto();
  const auto bank = NoiseBank::generate(model, 64, g, RngStream{11});
  ParticleCloud one = [&] {
    ThreadScope s(1);
    return s.execute([&] { return simulate_coupled(model, bank); });
  }();
  ThreadScope s(4);
  const auto four = s.execute([&] { return simulate_coupled(model, bank); });
  CHECK(one == four);
}

TEST_CASE("atom subsampling knob") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  auto model = kuramoto();
  const auto bank = NoiseBank::generate(model, 80, g, RngStream{13});
  const auto full = simulate_coupled(model, bank);
  model.drift_atoms = 80;  // not smaller than the cloud: off
  CHECK(simulate_coupled(model, bank) == full);
  model.drift_atoms = 20;
  const auto sub = simulate_coupled(model, bank);
  CHECK_FALSE(sub == full);
  CHECK(simulate_coupled(model, bank) == sub);
  // Initial segments are untouched and the bias stays small for a smooth drift.
  for (std::size_t k = 0; k <= g->zero_index(); ++k) CHECK(sub.path(0)[k] == full.path(0)[k]);
  double max_gap = 0.0;
  const std::size_t last = g->last_index();
  for (std::size_t i = 0; i < sub.size(); ++i) {
    max_gap = std::max(max_gap, std::abs(sub.path(i)[last] - full.path(i)[last]));
  }
  CHECK(max_gap < 0.5);
  const auto dec = simulate_decoupled(model, full, bank);
  CHECK(simulate_decoupled(model, full, bank) == dec);
  model.drift_atoms = 0;
  CHECK_FALSE(simulate_decoupled(model, full, bank) == dec);
}
