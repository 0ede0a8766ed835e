#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "mkv/error.hpp"
#include "mkv/mkv_solver.hpp"
#include "mkv/rate_analysis.hpp"
#include "mkv/simulate.hpp"

using namespace mkv;

namespace {

ModelSpec constant_model(double c, double h) {
  return make_constant_model(c, testing::common(0.0, 1.0, ConstantInit{0.0}, PointMassMedia{{0.0}}, Diffusion{h, 0.0}));
}

ModelSpec kuramoto() {
  KuramotoParams p;
  p.coupling = 0.5;
  p.media_gain = 1.0;
  p.delay_base = 0.1;
  return make_kuramoto_model(p, testing::common(0.2, 1.0, BrownianSegmentInit{0.0, 0.5}, DiscreteMedia{{{-0.5}, {0.5}}}));
}

}  // namespace

TEST_CASE("entropy of a constant drift against the driftless reference") {
  const auto g = make_time_grid(0.0, 1.0, 0.01);
  const double c = 0.5, h = 1.0;
  const auto model = constant_model(c, h);
  const auto eta = simulate_reference(model, 50, g, RngStream{1});
  RateComparison cmp;
  cmp.model = make_zero_model(testing::common(0.0, 1.0));
  const auto r = rate_H(model, eta, 5000, RngStream{2}, cmp);
  const double exact = c * c / (2.0 * h * h);
  CHECK(std::abs(r.entropy_vs_P.value - exact) < 4.0 * r.entropy_vs_P.stderr_);
  CHECK(r.gamma_nu_mu.value == 0.0);
  CHECK(r.h_nu_mu.value == r.entropy_vs_P.value);
  // Measure-free: the sample cloud gives the same D as eta.
  CHECK(r.h_mu_mu.value == 0.0);
  CHECK(r.kappa == 0.0);
}

TEST_CASE("without a comparison H_eta(Q_eta) is exactly zero") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = kuramoto();
  const auto eta = simulate_coupled(model, 80, g, RngStream{3});
  const auto r = rate_H(model, eta, 200, RngStream{4});
  CHECK(r.h_nu_mu.value == 0.0);
  CHECK(r.h_nu_mu.stderr_ == 0.0);
  CHECK(r.gamma_nu_mu.value == r.entropy_vs_P.value);
  CHECK(r.kappa == doctest::Approx(1.0));
  CHECK_THROWS_AS(rate_H(model, eta, 50, RngStream{4}), Error);
}

TEST_CASE("rate functional against P has the negative closed form") {
  // Under P, E[D] = -E int f^2 / (2 h^2) = -c^2 T / (2 h^2) for a constant drift.
  const auto g = make_time_grid(0.0, 1.0, 0.02);
  const double c = 0.8, h = 1.5;
  const auto model = constant_model(c, h);
  const auto p_samples = simulate_reference(model, 5000, g, RngStream{5});
  const auto est = gamma_estimate(model, p_samples, p_samples);
  CHECK(std::abs(est.value + c * c / (2.0 * h * h)) < 4.0 * est.stderr_);
  CHECK(est.samples == 5000);
  const auto q = simulate_decoupled(model, p_samples, 300, RngStream{6});
  CHECK(entropy_vs_P(model, p_samples, q).value == gamma_estimate(model, p_samples, q).value);
}

TEST_CASE("entropy is nonnegative in expectation for Kuramoto") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = kuramoto();
  const auto eta = simulate_coupled(model, 100, g, RngStream{7});
  const auto r = rate_H(model, eta, 2000, RngStream{8});
  CHECK(r.entropy_vs_P.value > -3.0 * r.entropy_vs_P.stderr_);
}

TEST_CASE("test functionals on hand paths") {
  const auto g = make_time_grid(0.25, 1.0, 0.25);
  std::vector<double> v{9.0, 0.0, 1.0, 2.0, 3.0, 0.5};  // node -0.25 is ignored by every statistic
  const ParticleCloud c(g, 1, v, {0.0});
  const TestFunctional term{"t", TestFunctional::Statistic::Terminal, ScalarFn::affine(1.0, 0.0)};
  const TestFunctional avg{"a", TestFunctional::Statistic::TimeAverage, ScalarFn::affine(1.0, 0.0)};
  const TestFunctional mx{"m", TestFunctional::Statistic::RunningMax, ScalarFn::affine(1.0, 0.0)};
  CHECK(term(c.path(0)) == 0.5);
  CHECK(avg(c.path(0)) == doctest::Approx((0.5 + 1.5 + 2.5 + 1.75) / 4.0));
  CHECK(mx(c.path(0)) == 3.0);
  const TestFunctional s{"s", TestFunctional::Statistic::Terminal, ScalarFn::sine()};
  CHECK(s.bl_norm() == 2.0);
  CHECK(integrate(s, c) == doctest::Approx(std::sin(0.5)));
}

TEST_CASE("weak form residual basics") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = kuramoto();
  const auto nu = simulate_coupled(model, 200, g, RngStream{9});
  const MediaSample w({0.5});
  const auto at0 = pde_residual(model, nu, ScalarFn::sine(), w, 0.0);
  CHECK(at0.lhs == 0.0);
  CHECK(at0.rhs == 0.0);
  const auto flat = pde_residual(model, nu, ScalarFn::constant(2.0), w, 1.0);
  CHECK(flat.lhs == 0.0);
  CHECK(flat.rhs == 0.0);
  CHECK(flat.slice_size > 50.0);
  CHECK(flat.slice_size < 150.0);
  try {
    pde_residual(model, nu, ScalarFn::sine(), MediaSample({0.1}), 1.0);
    FAIL("expected EmptySlice");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySlice);
  }
  CHECK_THROWS_AS(pde_residual(model, nu, ScalarFn::clip(), w, 1.0), Error);
  const auto kernel = pde_residual(model, nu, ScalarFn::sine(), MediaSample({0.1}), 1.0, PdeOptions{0.5});
  CHECK(kernel.slice_size > 100.0);
}

TEST_CASE("weak form holds for Brownian motion with drift") {
  const auto g = make_time_grid(0.0, 1.0, 0.01);
  const auto model = constant_model(0.7, 1.0);
  const auto nu = simulate_reference(model, 10, g, RngStream{10});
  const auto q = simulate_decoupled(model, nu, 4000, RngStream{11});
  for (const auto& phi : {ScalarFn::sine(), ScalarFn::cosine(1.0, 2.0), ScalarFn::gauss()}) {
    const auto r = pde_residual(model, q, phi, MediaSample({0.0}), 1.0);
    CHECK(r.residual < 4.0 * r.stderr_ + 1e-3);
  }
}

TEST_CASE("log-log slope of an exact power law") {
  const std::vector<double> n{250, 500, 1000, 2000};
  std::vector<double> y;
  for (double v : n) y.push_back(3.0 * std::pow(v, -0.5));
  CHECK(loglog_slope(n, y) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), Error);
}

TEST_CASE("lln report shape") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  const auto model = kuramoto();
  const auto nu = simulate_coupled(model, 400, g, RngStream{12});
  const auto tests = std::vector<TestFunctional>{{"s", TestFunctional::Statistic::Terminal, ScalarFn::sine()},
                                                 {"c", TestFunctional::Statistic::RunningMax, ScalarFn::cosine()}};
  LlnOptions opt;
  opt.lp_cap = 120;
  const auto rep = lln_report(model, nu, {20, 40}, tests, 3, RngStream{13}, opt);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.slopes.size() == 2);
  CHECK(rep.baseline.size() == 2);
  for (const auto& row : rep.rows) {
    CHECK(row.error_mean.size() == 2);
    CHECK(row.bl_mean > 0.0);
    CHECK(row.bl_mean <= 2.0);
  }
  std::ostringstream out;
  write_lln_csv(out, rep, tests);
  CHECK(out.str().find('\n') != std::string::npos);
}
