#include "mkv/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "mkv/error.hpp"
#include "mkv/girsanov.hpp"
#include "mkv/metrics.hpp"
#include "mkv/mkv_solver.hpp"
#include "mkv/parallel.hpp"
#include "mkv/rate_analysis.hpp"
#include "mkv/simulate.hpp"

namespace mkv {
namespace {

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

constexpr double kC = 0.5;
constexpr double kDt = 0.01;

ModelCommon plain_common(double x0 = 0.0) {
  ModelCommon c;
  c.tau = 0.0;
  c.T = 1.0;
  c.init_law = ConstantInit{x0};
  c.media_law = PointMassMedia{{0.0}};
  return c;
}

// Delayed Kuramoto oscillators with two natural frequencies; f_sup = f_sl = 1.
ModelSpec kuramoto_model() {
  ModelCommon c;
  c.tau = 0.2;
  c.T = 1.0;
  c.init_law = BrownianSegmentInit{0.0, 0.5};
  c.media_law = DiscreteMedia{{{-0.5}, {0.5}}};
  KuramotoParams p;
  p.shape = ScalarFn::sine();
  p.coupling = 0.5;
  p.media_gain = 1.0;
  p.delay_base = 0.1;
  p.delay_slope = 0.0;
  return make_kuramoto_model(p, c);
}

GridPtr grid_for(const ModelSpec& m) { return make_time_grid(m.tau, m.T, kDt); }

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s + '\n';
}

std::string num(double v) { return format_double(v); }

// Artifacts shared between criteria, computed on first use.
struct Shared {
  RngStream seed;
  std::optional<ModelSpec> kuramoto;
  std::optional<ParticleCloud> kuramoto_star;
  std::optional<PicardTrace> kuramoto_trace;
  std::optional<ParticleCloud> kuramoto_pilot;

  const ModelSpec& kura() {
    if (!kuramoto) kuramoto = kuramoto_model();
    return *kuramoto;
  }
  const ParticleCloud& pilot() {
    if (!kuramoto_pilot) kuramoto_pilot = simulate_coupled(kura(), 200, grid_for(kura()), seed.fork(11));
    return *kuramoto_pilot;
  }
  const ParticleCloud& star() {
    if (!kuramoto_star) {
      SolverOptions opt;
      opt.particles = 1000;
      opt.tol = 0.02;
      opt.max_iter = 50;
      try {
        auto sol = solve_mkv(kura(), grid_for(kura()), opt, seed.fork(60));
        kuramoto_star = std::move(sol.cloud);
        kuramoto_trace = std::move(sol.trace);
      } catch (const NotConverged& e) {
        kuramoto_star = e.solution().cloud;
        kuramoto_trace = e.solution().trace;
      }
    }
    return *kuramoto_star;
  }
};

struct GirsanovCase {
  std::string name;
  ModelSpec model;
  ParticleCloud nu;
};

std::vector<GirsanovCase> girsanov_cases(Shared& sh) {
  const ModelSpec zero = make_zero_model(plain_common());
  const ModelSpec cst = make_constant_model(kC, plain_common());
  const auto g = grid_for(zero);
  return {{"zero", zero, simulate_reference(zero, 10, g, sh.seed.fork(12))},
          {"constant", cst, simulate_reference(cst, 10, g, sh.seed.fork(12))},
          {"kuramoto", sh.kura(), sh.pilot()}};
}

const std::vector<double> kAlphas{-2.0, -1.0, 1.0, 2.0};

CriterionResult c1_martingale(Shared& sh, ArtifactWriter& w) {
  std::string csv = "model,alpha,mc_mean,mc_stderr,pass\n";
  int pass = 0, cells = 0;
  for (const auto& gc : girsanov_cases(sh)) {
    const auto rows = mc_martingale_sweep(gc.model, gc.nu, kAlphas, {gc.model.T}, 20000, sh.seed.fork(13));
    for (const auto& r : rows) {
      ++cells;
      pass += r.pass;
      csv += csv_row({gc.name, num(r.alpha), num(r.mc_mean), num(r.mc_stderr), r.pass ? "1" : "0"});
    }
  }
  w.write_text("c01_martingale.csv", csv);
  return {1, "martingale mean-one", pass >= 11, fmt("%d/%d cells within 3 stderr (need 11)", pass, cells), 0, 120};
}

CriterionResult c2_moment(Shared& sh, ArtifactWriter& w) {
  std::string csv = "model,alpha,mc_mean,mc_stderr,bound,pass\n";
  int pass = 0, cells = 0;
  bool tight = false;
  double tight_mean = 0.0, tight_se = 0.0;
  for (const auto& gc : girsanov_cases(sh)) {
    const auto rows = moment_bound_sweep(gc.model, gc.nu, kAlphas, 20000, sh.seed.fork(13));
    for (const auto& r : rows) {
      ++cells;
      pass += r.pass;
      csv += csv_row({gc.name, num(r.alpha), num(r.mc_mean), num(r.mc_stderr), num(r.bound), r.pass ? "1" : "0"});
      if (gc.name == "constant" && r.alpha == 2.0) {
        tight_mean = r.mc_mean;
        tight_se = r.mc_stderr;
        tight = std::abs(r.mc_mean - std::exp(kC * kC)) <= 3.0 * r.mc_stderr;
      }
    }
  }
  w.write_text("c02_moment_bound.csv", csv);
  return {2, "moment bound", pass == cells && tight,
          fmt("%d/%d cells under bound; tight case %.6f vs e^{c^2T}=%.6f (se %.2e)", pass, cells, tight_mean,
              std::exp(kC * kC), tight_se),
          0, 120};
}

CriterionResult c3_closed_form(Shared& sh, ArtifactWriter& w) {
  const ModelSpec cst = make_constant_model(kC, plain_common());
  const auto g = grid_for(cst);
  const ParticleCloud ref = simulate_reference(cst, 200, g, sh.seed.fork(30));
  const ParticleCloud drifted = simulate_coupled(cst, 100, g, sh.seed.fork(31));
  double worst = 0.0;
  for (const ParticleCloud* cloud : {&ref, &drifted}) {
    const CloudView nu = ref.view();
    for (std::size_t i = 0; i < cloud->size(); ++i) {
      const PathView y = cloud->path(i);
      const double oracle = kC * (y[g->last_index()] - y[g->zero_index()]) - 0.5 * kC * kC * cst.T;
      worst = std::max(worst, std::abs(girsanov_functional(cst, nu, *cloud, i) - oracle));
    }
  }
  w.write_text("c03_closed_form.csv", "max_abs_error\n" + num(worst) + "\n");
  return {3, "Girsanov closed form", worst <= 1e-12, fmt("max |D - oracle| = %.3e over 300 paths", worst), 0, 10};
}

CriterionResult c4_entropy(Shared& sh, ArtifactWriter& w) {
  const ModelSpec cst = make_constant_model(kC, plain_common());
  const ModelSpec zero = make_zero_model(plain_common());
  const auto g = grid_for(cst);
  const ParticleCloud eta = simulate_reference(cst, 10, g, sh.seed.fork(40));
  const ParticleCloud samples = simulate_decoupled(cst, eta, 20000, sh.seed.fork(41));
  const Estimate ent = entropy_vs_P(cst, eta, samples);
  RateComparison cmp;
  cmp.model = zero;
  const RateReport rate = rate_H(cst, eta, 20000, sh.seed.fork(42), cmp);
  const double target = 0.5 * kC * kC * cst.T;
  const bool ok1 = std::abs(ent.value - target) <= 3.0 * ent.stderr_;
  const bool ok2 = std::abs(rate.h_nu_mu.value - target) <= 3.0 * rate.h_nu_mu.stderr_;
  w.write_text("c04_entropy.csv", "quantity,value,stderr,target\n" +
                                      csv_row({"entropy_vs_P", num(ent.value), num(ent.stderr_), num(target)}) +
                                      csv_row({"h_nu_mu", num(rate.h_nu_mu.value), num(rate.h_nu_mu.stderr_),
                                               num(target)}));
  return {4, "entropy closed form", ok1 && ok2,
          fmt("I(Q|P)=%.5f (se %.5f), H_nu=%.5f (se %.5f), target %.5f", ent.value, ent.stderr_,
              rate.h_nu_mu.value, rate.h_nu_mu.stderr_, target),
          0, 60};
}

ParticleCloud random_cloud(const GridPtr& g, std::size_t n, std::size_t dim, SplitMix64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 0.2 + 1.5 * uniform01(rng);
  const double shift = 2.0 * uniform01(rng) - 1.0;
  std::vector<double> values(n * g->size()), media(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    double x = shift + 0.5 * normal(rng);
    for (std::size_t k = 0; k < g->size(); ++k) {
      values[i * g->size() + k] = x;
      x += scale * std::sqrt(g->dt()) * normal(rng);
    }
    for (std::size_t c = 0; c < dim; ++c) media[i * dim + c] = std::floor(3.0 * uniform01(rng)) * 0.5;
  }
  return ParticleCloud(g, dim, std::move(values), std::move(media));
}

CriterionResult c5_bl(Shared& sh, ArtifactWriter& w) {
  std::string csv = "check,value,reference\n";
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  double two_point = 0.0;
  for (double r : {0.1, 1.0, 10.0}) {
    const ParticleCloud a(g, 1, std::vector<double>(g->size(), 0.0), {0.0});
    const ParticleCloud b(g, 1, std::vector<double>(g->size(), r), {0.0});
    const double v = bl_distance_exact(a, b, 1.0, SupPlusEuclid{}).value;
    two_point = std::max(two_point, std::abs(v - 2.0 * r / (2.0 + r)));
    csv += csv_row({"two_point_r=" + num(r), num(v), num(2.0 * r / (2.0 + r))});
  }
  std::size_t axiom_violations = 0, sandwich_violations = 0;
  double worst_axiom = 0.0, worst_sandwich = 0.0;
  SplitMix64 rng = sh.seed.fork(50).engine();
  for (std::size_t trial = 0; trial < 200; ++trial) {
    const bool equal = trial % 2 == 0;
    const std::size_t dim = 1 + trial % 3 / 2;
    auto size = [&] { return 1 + static_cast<std::size_t>(uniform01(rng) * 60.0) % 60; };
    const std::size_t n0 = size();
    const ParticleCloud a = random_cloud(g, n0, dim, rng);
    const ParticleCloud b = random_cloud(g, equal ? n0 : size(), dim, rng);
    const ParticleCloud c = random_cloud(g, equal ? n0 : size(), dim, rng);
    const MetricKind kind = trial % 4 < 2 ? MetricKind{SupPlusEuclid{}} : MetricKind{KuramotoWindow{1.0}};
    const double t = g->node(g->zero_index() + static_cast<std::size_t>(uniform01(rng) * g->future_steps()));
    auto d = [&](const ParticleCloud& x, const ParticleCloud& y) { return bl_distance_exact(x, y, t, kind).value; };
    const double ab = d(a, b), ba = d(b, a), bc = d(b, c), ac = d(a, c), aa = d(a, a);
    const double viol = std::max({aa, std::abs(ab - ba), ac - ab - bc, ab - ac - bc, bc - ab - ac, -ab, ab - 2.0});
    worst_axiom = std::max(worst_axiom, viol);
    axiom_violations += viol > 1e-8;
    const RngStream dict_seed = sh.seed.fork(51).with(trial, Purpose::Dictionary);
    for (auto [x, y, exact] : {std::tuple{&a, &b, ab}, std::tuple{&b, &c, bc}, std::tuple{&a, &c, ac}}) {
      const double lower = bl_distance_dictionary(*x, *y, t, kind, 64, dict_seed).value;
      double s = lower - exact;
      if (x->size() == y->size()) s = std::max(s, exact - coupling_upper_bound(*x, *y, t, kind));
      worst_sandwich = std::max(worst_sandwich, s);
      sandwich_violations += s > 1e-8;
    }
  }
  csv += csv_row({"axiom_violations", std::to_string(axiom_violations), "0"});
  csv += csv_row({"worst_axiom_excess", num(worst_axiom), "1e-8"});
  csv += csv_row({"sandwich_violations", std::to_string(sandwich_violations), "0"});
  csv += csv_row({"worst_sandwich_excess", num(worst_sandwich), "1e-8"});
  w.write_text("c05_bl_metric.csv", csv);
  return {5, "BL metric exactness", two_point <= 1e-6 && axiom_violations == 0 && sandwich_violations == 0,
          fmt("two-point err %.2e; axiom violations %zu/200; sandwich violations %zu", two_point, axiom_violations,
              sandwich_violations),
          0, 180};
}

struct Moments {
  double mean, mean_se, var, var_se;
};

Moments moments_at(const ParticleCloud& cloud, std::size_t k) {
  const double n = static_cast<double>(cloud.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) mean += cloud.path(i)[k];
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d = cloud.path(i)[k] - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / (n - 1);
  m4 /= n;
  return {mean, std::sqrt(var / n), var, std::sqrt(std::max(m4 - var * var, 0.0) / n)};
}

CriterionResult c6_fixed_point(Shared& sh, ArtifactWriter& w) {
  std::string csv = "check,value,reference,pass\n";
  // (a) measure-free drift.
  ModelCommon ca = plain_common();
  ca.media_law = DiscreteMedia{{{-0.5}, {0.5}}};
  const ModelSpec local = make_local_sine_model(0.5, 1.0, ca);
  SolverOptions opt;
  opt.particles = 1000;
  const RngStream seed_a = sh.seed.fork(61);
  const auto sol_a = solve_mkv(local, grid_for(local), opt, seed_a);
  const ResidualReport res_a = fixed_point_residual(local, sol_a.cloud, seed_a);
  const bool ok_a = sol_a.trace.iterates.size() == 1 && res_a.residual <= res_a.baseline + 1e-9;
  csv += csv_row({"a_iterations", std::to_string(sol_a.trace.iterates.size()), "1", ok_a ? "1" : "0"});
  csv += csv_row({"a_residual", num(res_a.residual), num(res_a.baseline), ok_a ? "1" : "0"});

  // (b) pure media drift f = omega_1 with omega ~ U[0, 1] and xi_0 = 0.2.
  ModelCommon cb = plain_common(0.2);
  cb.media_law = UniformBoxMedia{{0.0}, {1.0}};
  const ModelSpec media = make_media_drift_model(1.0, cb);
  SolverOptions opt_b;
  opt_b.particles = 2000;
  const auto sol_b = solve_mkv(media, grid_for(media), opt_b, sh.seed.fork(62));
  bool ok_b = true;
  for (double t : {0.5, 1.0}) {
    const Moments m = moments_at(sol_b.cloud, restrict_index(sol_b.cloud.grid(), t));
    const double mean_ref = 0.2 + 0.5 * t;
    const double var_ref = t * t / 12.0 + t;
    const bool ok = std::abs(m.mean - mean_ref) <= 3.0 * m.mean_se && std::abs(m.var - var_ref) <= 3.0 * m.var_se;
    ok_b = ok_b && ok;
    csv += csv_row({"b_mean_t=" + num(t), num(m.mean), num(mean_ref), ok ? "1" : "0"});
    csv += csv_row({"b_var_t=" + num(t), num(m.var), num(var_ref), ok ? "1" : "0"});
  }

  // (c) Kuramoto oscillators.
  const ParticleCloud& star = sh.star();
  const PicardTrace& trace = *sh.kuramoto_trace;
  const ResidualReport res_c = fixed_point_residual(sh.kura(), star, sh.seed.fork(60));
  const bool ok_c = trace.converged && trace.iterates.size() <= 20 && res_c.residual <= 0.02 + res_c.baseline;
  csv += csv_row({"c_iterations", std::to_string(trace.iterates.size()), "20", ok_c ? "1" : "0"});
  csv += csv_row({"c_residual", num(res_c.residual), num(0.02 + res_c.baseline), ok_c ? "1" : "0"});
  std::ostringstream tr;
  tr << "iter,coupling_dist,lp_dist_subsample\n";
  for (const auto& r : trace.iterates) {
    tr << r.iteration << ',' << num(r.coupling_dist) << ',' << num(r.lp_dist_subsample) << '\n';
  }
  w.write_text("c06_fixed_point.csv", csv);
  w.write_text("c06_kuramoto_trace.csv", tr.str());
  return {6, "McKean-Vlasov fixed point", ok_a && ok_b && ok_c,
          fmt("(a) %zu iter, residual %.4f vs baseline %.4f; (b) %s; (c) %zu iter, residual %.4f vs %.4f",
              sol_a.trace.iterates.size(), res_a.residual, res_a.baseline, ok_b ? "moments match" : "moment mismatch",
              trace.iterates.size(), res_c.residual, 0.02 + res_c.baseline),
          0, 600};
}

CriterionResult c7_gronwall(Shared& sh, ArtifactWriter& w) {
  const ModelSpec& m = sh.kura();
  const auto g = grid_for(m);
  std::string csv = "pair,t,lhs,rhs,stderr,hard_violation\n";
  std::size_t violations = 0, rows = 0;
  double max_ratio = 0.0;
  for (std::size_t p = 0; p < 10; ++p) {
    const RngStream s = sh.seed.fork(700 + p);
    ParticleCloud mu = simulate_reference(m, 150, g, s.fork(1));
    ParticleCloud nu = p % 2 == 0 ? simulate_decoupled(m, mu, 150, s.fork(2)) : simulate_coupled(m, 150, g, s.fork(3));
    const auto table = contraction_diagnostic(m, mu, nu, {0.25, 0.5, 0.75, 1.0}, s.fork(4));
    for (const auto& r : table) {
      ++rows;
      violations += r.hard_violation;
      if (r.rhs > 0.0) max_ratio = std::max(max_ratio, r.lhs / r.rhs);
      csv += csv_row({std::to_string(p), num(r.t), num(r.lhs), num(r.rhs), num(r.stderr_),
                      r.hard_violation ? "1" : "0"});
    }
  }
  w.write_text("c07_gronwall.csv", csv);
  return {7, "Gronwall contraction", violations == 0,
          fmt("%zu hard violations over %zu rows; max lhs/rhs %.3f", violations, rows, max_ratio), 0, 300};
}

CriterionResult c8_minimizer(Shared& sh, ArtifactWriter& w) {
  const ModelSpec& m = sh.kura();
  const ParticleCloud& star = sh.star();
  const RateReport r = rate_H(m, star, 1000, sh.seed.fork(80));
  const double cap = 3.0 * r.h_mu_mu.stderr_ + r.kappa * 0.02;
  const bool ok_min = r.h_mu_mu.value <= cap;
  std::string csv = "check,value,reference\n" + csv_row({"H(Q_star)", num(r.h_mu_mu.value), num(cap)});
  bool exact = true;
  for (std::size_t q = 0; q < 5; ++q) {
    const std::size_t n = 50 + 25 * q;
    const ParticleCloud eta = simulate_coupled(m, n, grid_for(m), sh.seed.fork(81 + q));
    RateComparison cmp;
    cmp.cloud = eta;
    const RateReport e = rate_H(m, eta, 200, sh.seed.fork(90 + q), cmp);
    exact = exact && e.h_nu_mu.value == 0.0 && e.h_nu_mu.stderr_ == 0.0;
    csv += csv_row({"H_eta(Q_eta)_" + std::to_string(q), num(e.h_nu_mu.value), "0"});
  }
  w.write_text("c08_minimizer.csv", csv);
  return {8, "minimizer certificate", ok_min && exact,
          fmt("H(Q_star)=%.5f <= %.5f (se %.5f, kappa %.2f); H_eta(Q_eta) exact zero: %s", r.h_mu_mu.value, cap,
              r.h_mu_mu.stderr_, r.kappa, exact ? "yes" : "no"),
          0, 180};
}

CriterionResult c9_lln(Shared& sh, ArtifactWriter& w) {
  const ModelSpec cst = make_constant_model(kC, plain_common());
  SolverOptions opt;
  opt.particles = 50000;
  opt.lp_subsample = 200;
  const auto sol = solve_mkv(cst, grid_for(cst), opt, sh.seed.fork(90));
  const auto tests = std::vector<TestFunctional>{
      {"sin_terminal", TestFunctional::Statistic::Terminal, ScalarFn::sine()},
      {"clip_average", TestFunctional::Statistic::TimeAverage, ScalarFn::clip(-1.0, 1.0)},
      {"cos_max", TestFunctional::Statistic::RunningMax, ScalarFn::cosine()}};
  const LlnReport rep = lln_report(cst, sol.cloud, {250, 500, 1000, 2000}, tests, 3, sh.seed.fork(91));
  std::ostringstream out;
  write_lln_csv(out, rep, tests);
  w.write_text("c09_lln.csv", out.str());
  bool slopes_ok = true;
  std::string slopes;
  for (double s : rep.slopes) {
    slopes_ok = slopes_ok && s >= -0.7 && s <= -0.3;
    slopes += (slopes.empty() ? "" : ", ") + fmt("%.3f", s);
  }
  bool mono = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double spread = std::max(rep.rows[i].bl_spread, rep.rows[i - 1].bl_spread);
    mono = mono && rep.rows[i].bl_mean <= rep.rows[i - 1].bl_mean + spread;
  }
  return {9, "hydrodynamic limit", slopes_ok && mono,
          fmt("slopes [%s] (need [-0.7, -0.3]); d_BL nonincreasing: %s", slopes.c_str(), mono ? "yes" : "no"), 0,
          600};
}

CriterionResult c10_pde(Shared& sh, ArtifactWriter& w) {
  std::string csv = "case,phi,omega,t,lhs,rhs,residual,stderr,reference,pass\n";
  const double x0 = 0.7;
  const ModelSpec zero = make_zero_model(plain_common(x0));
  SolverOptions opt;
  opt.particles = 4000;
  const auto sol = solve_mkv(zero, grid_for(zero), opt, sh.seed.fork(100));
  bool ok_a = true;
  for (double t : {0.5, 1.0}) {
    const PdeReport r = pde_residual(zero, sol.cloud, ScalarFn::sine(), MediaSample({0.0}), t);
    const double analytic = std::sin(x0) * (std::exp(-t / 2.0) - 1.0);
    const bool ok = std::abs(r.lhs - analytic) <= 3.0 * (r.lhs_stderr + 2.0 * kDt) &&
                    r.residual <= 3.0 * (r.stderr_ + 2.0 * kDt);
    ok_a = ok_a && ok;
    csv += csv_row({"brownian", "sin", "0", num(t), num(r.lhs), num(r.rhs), num(r.residual), num(r.stderr_),
                    num(analytic), ok ? "1" : "0"});
  }
  const ModelSpec& m = sh.kura();
  const ParticleCloud& star = sh.star();
  bool ok_b = true;
  std::size_t cells = 0, passed = 0;
  for (const auto& phi : {ScalarFn::sine(), ScalarFn::cosine(), ScalarFn::gauss()}) {
    for (double wv : {-0.5, 0.5}) {
      const PdeReport r = pde_residual(m, star, phi, MediaSample({wv}), m.T);
      const bool ok = r.residual <= 3.0 * r.stderr_;
      ++cells;
      passed += ok;
      ok_b = ok_b && ok;
      csv += csv_row({"kuramoto", phi.kind_name(), num(wv), num(r.t), num(r.lhs), num(r.rhs), num(r.residual),
                      num(r.stderr_), num(3.0 * r.stderr_), ok ? "1" : "0"});
    }
  }
  w.write_text("c10_pde.csv", csv);
  return {10, "PDE weak form", ok_a && ok_b,
          fmt("Brownian sin check %s; Kuramoto %zu/%zu cells within 3 error bars", ok_a ? "ok" : "failed", passed,
              cells),
          0, 180};
}

using Criterion = std::function<CriterionResult(Shared&, ArtifactWriter&)>;

std::vector<CriterionResult> run_core(const RngStream& seed, ArtifactWriter& w) {
  const std::vector<Criterion> all{c1_martingale, c2_moment, c3_closed_form, c4_entropy, c5_bl,
                                   c6_fixed_point, c7_gronwall, c8_minimizer, c9_lln, c10_pde};
  Shared sh;
  sh.seed = seed;
  std::vector<CriterionResult> out;
  std::string summary = "id,name,pass,detail\n";
  for (const auto& c : all) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c(sh, w);
    } catch (const std::exception& e) {
      r.id = static_cast<int>(out.size()) + 1;
      r.name = "criterion " + std::to_string(r.id);
      r.pass = false;
      r.errored = true;
      r.detail = std::string("error: ") + e.what();
      r.budget_seconds = 0.0;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summary += csv_row({std::to_string(r.id), r.name, r.pass ? "1" : "0", "\"" + r.detail + "\""});
    out.push_back(r);
  }
  w.write_text("acceptance.csv", summary);
  std::string timings = "id,seconds,budget\n";
  for (const auto& r : out) timings += csv_row({std::to_string(r.id), num(r.seconds), num(r.budget_seconds)});
  w.write_text("timings.csv", timings, true);
  return out;
}

}  // namespace

bool AcceptanceReport::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& r) { return r.ok(); });
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options, ArtifactWriter& w) {
  const RngStream seed{options.seed};
  AcceptanceReport rep;
  if (!options.determinism) {
    rep.criteria = run_core(seed, w);
    return rep;
  }
  const std::size_t wide = std::max<std::size_t>(hardware_threads(), 4);
  nlohmann::json manifests[2];
  std::vector<CriterionResult> first;
  double total = 0.0;
  const std::size_t counts[2] = {wide, 1};
  for (int run = 0; run < 2; ++run) {
    const auto start = std::chrono::steady_clock::now();
    ThreadScope scope(counts[run]);
    ArtifactWriter sub(options.out_dir / ("threads_" + std::to_string(counts[run])));
    auto results = scope.execute([&] { return run_core(seed, sub); });
    manifests[run] = sub.write_manifest();
    total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (run == 0) first = std::move(results);
  }
  w.write_text("acceptance.csv", [&] {
    std::string s = "id,name,pass,detail\n";
    for (const auto& r : first) s += csv_row({std::to_string(r.id), r.name, r.pass ? "1" : "0", "\"" + r.detail + "\""});
    return s;
  }());
  rep.criteria = std::move(first);
  CriterionResult det;
  det.id = 11;
  det.name = "determinism";
  det.pass = same_manifest(manifests[0], manifests[1]) && !manifests[0].at("files").empty();
  det.detail = fmt("manifests at %zu and 1 threads %s (%zu hashed files)", wide, det.pass ? "identical" : "differ",
                   manifests[0].at("files").size());
  det.seconds = total;
  double suite = 0.0;
  for (const auto& r : rep.criteria) suite += r.budget_seconds;
  det.budget_seconds = 2.0 * suite;
  rep.criteria.push_back(det);
  return rep;
}

std::string format_line(const CriterionResult& r) {
  const char* status = r.ok() ? "PASS" : "FAIL";
  std::string line = fmt("[%s] C%-2d %-26s %s", status, r.id, r.name.c_str(), r.detail.c_str());
  line += fmt(" | %.1fs of %.0fs%s", r.seconds, r.budget_seconds, r.within_budget() ? "" : " (over budget)");
  return line;
}

nlohmann::json acceptance_json(const AcceptanceReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : report.criteria) {
    arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  return arr;
}

}  // namespace mkv
