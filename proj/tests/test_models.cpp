#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mkv/error.hpp"
#include "mkv/models.hpp"

using namespace mkv;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

ParticleCloud replicate(const ParticleCloud& c, std::size_t times) {
  std::vector<std::size_t> idx(c.size() * times);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i % c.size();
  return c.select(idx);
}

KuramotoParams kparams(double coupling, double gain, double base, double slope = 0.0) {
  KuramotoParams p;
  p.shape = ScalarFn::sine();
  p.coupling = coupling;
  p.media_gain = gain;
  p.delay_base = base;
  p.delay_slope = slope;
  return p;
}

}  // namespace

TEST_CASE("kuramoto drift of a single atom is the closed form") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = make_kuramoto_model(kparams(0.7, 0.3, 0.1), testing::common(0.2, 1.0));
  testing::Gen gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = gen.walk(g->size(), 0.2);
    const auto nu = testing::random_cloud(g, 1, gen, 0.2);
    const std::vector<double> omega{0.0};
    const std::size_t k = g->zero_index() + gen.index(g->future_steps() + 1);
    const double t = g->node(k);
    const double expected = 0.7 * std::sin(x[k] - nu.path(0)[k - 2]) + 0.3 * omega[0];
    const double got = eval_drift(model, t, PathView(*g, x), nu.view(), omega);
    CHECK(got == doctest::Approx(expected).epsilon(1e-14));
    // An N-fold copy of the same atom gives the same value bit for bit.
    CHECK(eval_drift(model, t, PathView(*g, x), replicate(nu, 1 + gen.index(9)).view(), omega) == got);
  }
}

TEST_CASE("kuramoto drift averages over atoms") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = make_kuramoto_model(kparams(1.0, 0.0, 0.0), testing::common(0.2, 1.0));
  testing::Gen gen(2);
  const auto x = gen.walk(g->size(), 0.2);
  const auto nu = testing::random_cloud(g, 2, gen, 0.2);
  const std::size_t k = g->last_index();
  const double expected = 0.5 * (std::sin(x[k] - nu.path(0)[k]) + std::sin(x[k] - nu.path(1)[k]));
  CHECK(eval_drift(model, 1.0, PathView(*g, x), nu.view(), std::vector<double>{0.0}) == doctest::Approx(expected));
}

TEST_CASE("media-dependent delay reads the interpolated past") {
  const auto g = make_time_grid(0.2, 1.0, 0.1);
  const auto media = DiscreteMedia{{{-0.5}, {0.5}}};
  const auto model = make_kuramoto_model(kparams(1.0, 0.0, 0.05, 0.1), testing::common(0.2, 1.0, ConstantInit{}, media));
  std::vector<double> x(g->size(), 0.0), y(g->size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = g->node(k);  // y(s) = s
  const ParticleCloud nu(g, 1, y, {0.5});
  const std::vector<double> omega{-0.5};
  // delay = 0.05 + 0.1 * 1 = 0.15, so y(t - delay) = t - 0.15 exactly under linear interpolation.
  const double t = 0.6;
  CHECK(eval_drift(model, t, PathView(*g, x), nu.view(), omega) == doctest::Approx(std::sin(-(t - 0.15))).epsilon(1e-12));
  CHECK(std::holds_alternative<KuramotoWindow>(model.metric_kind));
}

TEST_CASE("delays beyond the memory are rejected") {
  CHECK(code_of([] { make_kuramoto_model(kparams(1.0, 0.0, 0.3), testing::common(0.1, 1.0)); }) ==
        ErrorCode::DelayOutOfRange);
  // base + slope * diameter = 0.05 + 0.1 * 1 exceeds tau = 0.1.
  const auto media = DiscreteMedia{{{-0.5}, {0.5}}};
  CHECK(code_of([&] {
          make_kuramoto_model(kparams(1.0, 0.0, 0.05, 0.1), testing::common(0.1, 1.0, ConstantInit{}, media));
        }) == ErrorCode::DelayOutOfRange);
}

TEST_CASE("eval_drift guards its arguments") {
  const auto g = make_time_grid(0.0, 1.0, 0.1);
  auto model = make_constant_model(0.5, testing::common(0.0, 1.0));
  testing::Gen gen(4);
  const auto nu = testing::random_cloud(g, 2, gen);
  const std::vector<double> x(g->size(), 0.0), omega{0.0};
  const PathView px(*g, x);
  CHECK(eval_drift(model, 0.3, px, nu.view(), omega) == 0.5);
  CHECK(code_of([&] { eval_drift(model, 1.5, px, nu.view(), omega); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { eval_drift(model, 0.3, px, nu.view(), std::vector<double>{0.0, 1.0}); }) ==
        ErrorCode::DimensionMismatch);
  const auto other = make_time_grid(0.0, 1.0, 0.1 / 2);
  const std::vector<double> xo(other->size(), 0.0);
  CHECK(code_of([&] { eval_drift(model, 0.3, PathView(*other, xo), nu.view(), omega); }) == ErrorCode::GridMismatch);
  model.audit = true;
  model.bounds.f_sup = 0.1;
  CHECK(code_of([&] { eval_drift(model, 0.3, px, nu.view(), omega); }) == ErrorCode::BoundViolation);
  CHECK(code_of([&] { require_model_grid(model, *make_time_grid(0.0, 2.0, 0.1)); }) == ErrorCode::GridMismatch);
}

TEST_CASE("memory drift with linear integrand is integrated exactly") {
  // kernel constant, weight constant and rate linear on the path range: the trapezoid rule is exact.
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  GlParams p;
  p.kernel = ScalarFn::constant(2.0);
  p.weight = ScalarFn::constant(1.5);
  p.rate = ScalarFn::clip(-10.0, 10.0, 1.0, 0.0);
  p.window = ScalarFn::constant(0.13);  // ends between nodes
  const auto model = make_gl_model(p, testing::common(0.2, 1.0));
  std::vector<double> y(g->size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = 3.0 * g->node(k) + 1.0;
  const ParticleCloud nu(g, 1, y, {0.0});
  const std::vector<double> x(g->size(), 0.0), omega{0.0};
  for (double t : {0.0, 0.3, 1.0}) {
    const double a = t - 0.13;
    // int_a^t 2 * 1.5 * (3 s + 1) ds
    const double exact = 3.0 * (1.5 * (t * t - a * a) + (t - a));
    CHECK(eval_drift(model, t, PathView(*g, x), nu.view(), omega) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("memory drift with decaying kernel matches a fine quadrature") {
  const auto g = make_time_grid(0.2, 1.0, 0.01);
  GlParams p;
  p.kernel = ScalarFn::exp_decay(1.0, 2.0);
  p.weight = ScalarFn::constant(1.0);
  p.rate = ScalarFn::clip(0.0, 1.0);
  p.window = ScalarFn::constant(0.1);
  const auto model = make_gl_model(p, testing::common(0.2, 1.0));
  const std::vector<double> y(g->size(), 0.4), x(g->size(), 0.0), omega{0.0};
  const ParticleCloud nu(g, 1, y, {0.0});
  const double exact = 0.4 * (1.0 - std::exp(-0.2)) / 2.0;
  CHECK(eval_drift(model, 0.5, PathView(*g, x), nu.view(), omega) == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("declared bounds follow the model constants") {
  const auto media = DiscreteMedia{{{-0.5}, {0.5}}};
  const auto k = make_kuramoto_model(kparams(0.5, 1.0, 0.1), testing::common(0.2, 1.0, ConstantInit{}, media));
  CHECK(k.bounds.f_sup == doctest::Approx(0.5 * 1.0 + 1.0 * 0.5));
  CHECK(k.bounds.f_sl == doctest::Approx(0.5 * (1.0 + 1.0)));
  CHECK_FALSE(k.measure_free);
  GlParams p;
  p.kernel = ScalarFn::exp_decay(2.0, 1.0);
  p.weight = ScalarFn::sine(0.5, 1.0);
  p.rate = ScalarFn::clip(0.0, 1.0, 3.0);
  const auto gl = make_gl_model(p, testing::common(0.2, 1.0));
  CHECK(gl.bounds.f_sup == doctest::Approx(0.2 * 2.0 * 0.5 * 1.0));
  CHECK(gl.bounds.f_sl == doctest::Approx(0.2 * 2.0 * (0.5 * 3.0 + 0.5)));
  const auto h = make_zero_model(testing::common(0.0, 1.0, ConstantInit{}, media, Diffusion{1.0, 0.4}));
  CHECK(h.bounds.h_star == doctest::Approx(0.8));
  CHECK(h.bounds.h_sup == doctest::Approx(1.2));
  CHECK(h.measure_free);
  CHECK(code_of([&] { make_zero_model(testing::common(0.0, 1.0, ConstantInit{}, media, Diffusion{0.2, 1.0})); }) ==
        ErrorCode::BoundsError);
  CHECK(code_of([&] { make_gl_model(p, testing::common(0.0, 1.0)); }) == ErrorCode::BoundsError);
}

TEST_CASE("measure-free models ignore the cloud") {
  const auto g = make_time_grid(0.0, 1.0, 0.1);
  const auto media = UniformBoxMedia{{-1.0}, {1.0}};
  const auto m = make_local_sine_model(0.8, 0.5, testing::common(0.0, 1.0, ConstantInit{}, media));
  CHECK(m.measure_free);
  testing::Gen gen(6);
  const auto x = gen.walk(g->size(), 0.2);
  const auto a = testing::random_cloud(g, 3, gen), b = testing::random_cloud(g, 7, gen);
  const std::vector<double> omega{0.3};
  const double v = eval_drift(m, 0.5, PathView(*g, x), a.view(), omega);
  CHECK(v == eval_drift(m, 0.5, PathView(*g, x), b.view(), omega));
  CHECK(v == doctest::Approx(0.8 * std::sin(x[5]) + 0.5 * 0.3));
  const auto md = make_media_drift_model(2.0, testing::common(0.0, 1.0, ConstantInit{}, media));
  CHECK(eval_drift(md, 0.5, PathView(*g, x), a.view(), omega) == doctest::Approx(0.6));
}

TEST_CASE("initial segments and media follow their laws") {
  const auto g = make_time_grid(0.3, 1.0, 0.1);
  const auto cst = make_zero_model(testing::common(0.3, 1.0, ConstantInit{2.5}));
  const auto seg = sample_initial(cst, *g, RngStream{1});
  CHECK(seg.size() == g->past_steps() + 1);
  for (double v : seg) CHECK(v == 2.5);
  const auto uni = make_zero_model(testing::common(0.3, 1.0, UniformLevelInit{-1.0, 1.0}));
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto u = sample_initial(uni, *g, RngStream{s});
    CHECK(u.front() >= -1.0);
    CHECK(u.front() <= 1.0);
    for (double v : u) CHECK(v == u.front());
  }
  const auto br = make_zero_model(testing::common(0.3, 1.0, BrownianSegmentInit{0.7, 0.5}));
  const auto b = sample_initial(br, *g, RngStream{3});
  CHECK(b.front() == 0.7);
  CHECK(b.back() != 0.7);
  const auto disc = make_zero_model(testing::common(0.3, 1.0, ConstantInit{}, DiscreteMedia{{{-0.5}, {0.5}}}));
  int plus = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    const auto w = sample_media(disc, RngStream{s, 0, s, Purpose::Media});
    CHECK((w.coords[0] == 0.5 || w.coords[0] == -0.5));
    plus += w.coords[0] > 0;
  }
  CHECK(std::abs(plus - 200) < 60);
  const auto box = make_zero_model(testing::common(0.3, 1.0, ConstantInit{}, UniformBoxMedia{{0.0, -2.0}, {1.0, 2.0}}));
  CHECK(box.d == 2);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto w = sample_media(box, RngStream{s});
    CHECK(w.coords[0] >= 0.0);
    CHECK(w.coords[0] <= 1.0);
    CHECK(std::abs(w.coords[1]) <= 2.0);
  }
  CHECK(media_diameter(DiscreteMedia{{{0.0, 0.0}, {3.0, 4.0}}}) == doctest::Approx(5.0));
}

TEST_CASE("lipschitz audit accepts honest constants and flags understated ones") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto media = DiscreteMedia{{{-0.5}, {0.5}}};
  auto model = make_kuramoto_model(kparams(0.5, 1.0, 0.1), testing::common(0.2, 1.0, ConstantInit{}, media));
  const auto honest = lipschitz_audit(model, *g, 60, RngStream{5});
  CHECK(honest.ok());
  CHECK(honest.max_ratio <= model.bounds.f_sl * 1.05);
  model.bounds.f_sl = 0.01;
  model.bounds.f_sup = 0.01;
  const auto low = lipschitz_audit(model, *g, 60, RngStream{5});
  CHECK(low.lipschitz_violation);
  CHECK(low.drift_bound_violation);
}
