#include "mkv/rate_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mkv/error.hpp"
#include "mkv/girsanov.hpp"
#include "mkv/metrics.hpp"
#include "mkv/parallel.hpp"
#include "mkv/simulate.hpp"

namespace mkv {
namespace {

constexpr std::uint64_t kRateTag = 0x52415445ULL;
constexpr std::uint64_t kLlnTag = 0x4C4C4E00ULL;
constexpr std::uint64_t kBaselineTag = 0x4241534500ULL;

Estimate estimate_of(const std::vector<double>& v) {
  Estimate e;
  e.samples = v.size();
  if (v.empty()) return e;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  e.value = mean;
  const double n = static_cast<double>(v.size());
  e.stderr_ = v.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return e;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = estimate_of(v).value;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> functional_values(const ModelSpec& model, const CloudView& nu, const ParticleCloud& paths) {
  std::vector<double> d(paths.size());
  parallel_for(paths.size(), [&](std::size_t i) { d[i] = girsanov_functional(model, nu, paths, i); }, 8);
  return d;
}

}  // namespace

Estimate gamma_estimate(const ModelSpec& model, const ParticleCloud& nu, const ParticleCloud& mu_samples) {
  require_same_grid(nu.grid(), mu_samples.grid());
  return estimate_of(functional_values(model, nu.view(), mu_samples));
}

Estimate entropy_vs_P(const ModelSpec& model, const ParticleCloud& eta, const ParticleCloud& samples_of_q_eta) {
  return gamma_estimate(model, eta, samples_of_q_eta);
}

RateReport rate_H(const ModelSpec& model, const ParticleCloud& eta, std::size_t m, const RngStream& seed,
                  const RateComparison& compare) {
  if (m < 100) throw Error(ErrorCode::BoundsError, "rate_H needs at least 100 samples");
  const ParticleCloud samples = simulate_decoupled(model, eta, m, seed.fork(kRateTag));
  const auto d_eta = functional_values(model, eta.view(), samples);
  std::vector<double> d_nu = d_eta;
  if (compare.cloud || compare.model) {
    const ModelSpec& nu_model = compare.model ? *compare.model : model;
    const ParticleCloud& nu_cloud = compare.cloud ? *compare.cloud : eta;
    require_same_grid(nu_cloud.grid(), samples.grid());
    d_nu = functional_values(nu_model, nu_cloud.view(), samples);
  }
  const auto d_self = functional_values(model, samples.view(), samples);
  std::vector<double> diff_nu(m), diff_self(m);
  for (std::size_t i = 0; i < m; ++i) {
    diff_nu[i] = d_eta[i] - d_nu[i];
    diff_self[i] = d_eta[i] - d_self[i];
  }
  RateReport r;
  r.gamma_nu_mu = estimate_of(d_nu);
  r.entropy_vs_P = estimate_of(d_eta);
  r.h_nu_mu = estimate_of(diff_nu);
  r.h_mu_mu = estimate_of(diff_self);
  r.kappa = model.T * model.bounds.f_sup * model.bounds.f_sl / (model.bounds.h_star * model.bounds.h_star);
  return r;
}

double TestFunctional::operator()(const PathView& x) const {
  const TimeGrid& grid = x.grid();
  const std::size_t k0 = grid.zero_index();
  const std::size_t k1 = grid.last_index();
  double s = 0.0;
  switch (statistic) {
    case Statistic::Terminal:
      s = x[k1];
      break;
    case Statistic::TimeAverage: {
      // Trapezoid mean over [0, T]; 1-Lipschitz in the sup norm.
      double acc = 0.0;
      for (std::size_t k = k0; k < k1; ++k) acc += 0.5 * (x[k] + x[k + 1]);
      s = k1 > k0 ? acc / static_cast<double>(k1 - k0) : x[k0];
      break;
    }
    case Statistic::RunningMax:
      s = x[k0];
      for (std::size_t k = k0; k <= k1; ++k) s = std::max(s, x[k]);
      break;
  }
  return g(s);
}

double integrate(const TestFunctional& test, const ParticleCloud& cloud) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) sum += test(cloud.path(i));
  return sum / static_cast<double>(cloud.size());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::SizeMismatch, "slope fit needs two points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

LlnReport lln_report(const ModelSpec& model, const ParticleCloud& nu_star, const std::vector<std::size_t>& n_list,
                     const std::vector<TestFunctional>& tests, std::size_t replicates, const RngStream& seed,
                     const LlnOptions& options) {
  if (replicates < 3) throw Error(ErrorCode::BoundsError, "lln_report needs at least 3 replicates");
  if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end()) || n_list.front() == 0) {
    throw Error(ErrorCode::BoundsError, "N list must be ascending and positive");
  }
  const double T = model.T;
  std::vector<double> target(tests.size());
  for (std::size_t f = 0; f < tests.size(); ++f) target[f] = integrate(tests[f], nu_star);

  LlnReport report;
  for (std::size_t n : n_list) {
    LlnRow row;
    row.n = n;
    std::vector<std::vector<double>> err(tests.size(), std::vector<double>(replicates));
    std::vector<double> bl(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
      const RngStream run = seed.fork(kLlnTag + n).with_replicate(r);
      const ParticleCloud ln = simulate_coupled(model, n, nu_star.grid_ptr(), run);
      for (std::size_t f = 0; f < tests.size(); ++f) err[f][r] = std::abs(integrate(tests[f], ln) - target[f]);
      const std::size_t k = std::min({n, nu_star.size(), options.lp_cap / 2});
      const auto ia = sample_indices(n, k, run.with(0, Purpose::Subsample));
      const auto ib = sample_indices(nu_star.size(), k, run.with(1, Purpose::Subsample));
      bl[r] = bl_distance_exact(ln.select(ia), nu_star.select(ib), T, model.metric_kind).value;
    }
    for (std::size_t f = 0; f < tests.size(); ++f) {
      row.error_mean.push_back(estimate_of(err[f]).value);
      row.error_spread.push_back(sample_sd(err[f]));
    }
    row.bl_mean = estimate_of(bl).value;
    row.bl_spread = sample_sd(bl);
    report.rows.push_back(std::move(row));
  }
  std::vector<double> ns;
  for (std::size_t n : n_list) ns.push_back(static_cast<double>(n));
  for (std::size_t f = 0; f < tests.size(); ++f) {
    std::vector<double> e;
    for (const auto& row : report.rows) e.push_back(std::max(row.error_mean[f], 1e-300));
    report.slopes.push_back(n_list.size() >= 2 ? loglog_slope(ns, e) : 0.0);
  }
  const ParticleCloud fresh = simulate_decoupled(model, nu_star, nu_star.size(), seed.fork(kBaselineTag));
  for (std::size_t f = 0; f < tests.size(); ++f) {
    report.baseline.push_back(std::abs(integrate(tests[f], fresh) - target[f]));
  }
  return report;
}

PdeReport pde_residual(const ModelSpec& model, const ParticleCloud& nu_star, const ScalarFn& phi,
                       const MediaSample& omega, double t, const PdeOptions& options) {
  if (!phi.smooth_bounded()) throw Error(ErrorCode::BoundsError, "test function must be C^2 with bounded derivatives");
  if (omega.dim() != nu_star.dim()) throw Error(ErrorCode::DimensionMismatch, "omega dimension differs from cloud");
  const TimeGrid& grid = nu_star.grid();
  if (!(t >= -1e-12 && t <= grid.horizon() + 1e-12)) throw Error(ErrorCode::OutOfRange, "t outside [0, T]");
  if (options.bandwidth && !(*options.bandwidth > 0.0)) throw Error(ErrorCode::BoundsError, "bandwidth must be positive");

  std::vector<std::size_t> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < nu_star.size(); ++i) {
    const auto s = nu_star.media(i);
    double d2 = 0.0;
    for (std::size_t c = 0; c < s.size(); ++c) d2 += (s[c] - omega.coords[c]) * (s[c] - omega.coords[c]);
    double w = 0.0;
    if (options.bandwidth) {
      w = std::exp(-d2 / (2.0 * *options.bandwidth * *options.bandwidth));
    } else if (d2 <= 1e-24) {
      w = 1.0;
    }
    if (w > 0.0) {
      atoms.push_back(i);
      weights.push_back(w);
    }
  }
  if (atoms.empty()) throw Error(ErrorCode::EmptySlice, "no atoms match omega");

  const std::size_t k0 = grid.zero_index();
  const std::size_t kt = restrict_index(grid, std::max(t, 0.0));
  const double h = model.h(omega.span());
  const CloudView nu = nu_star.view();
  std::vector<double> lhs_i(atoms.size()), rhs_i(atoms.size());
  parallel_for(atoms.size(), [&](std::size_t a) {
    const PathView x = nu_star.path(atoms[a]);
    lhs_i[a] = phi(x[kt]) - phi(x[k0]);
    auto integrand = [&](std::size_t k) {
      return eval_drift(model, grid.node(k), x, nu, omega.span()) * phi.derivative(x[k]) +
             0.5 * h * h * phi.second_derivative(x[k]);
    };
    double acc = 0.0;
    if (kt > k0) {
      double prev = integrand(k0);
      for (std::size_t k = k0; k < kt; ++k) {
        const double cur = integrand(k + 1);
        acc += 0.5 * (prev + cur) * grid.dt();
        prev = cur;
      }
    }
    rhs_i[a] = acc;
  }, 4);

  double sw = 0.0, sw2 = 0.0, lhs = 0.0, rhs = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    sw += weights[a];
    sw2 += weights[a] * weights[a];
    lhs += weights[a] * lhs_i[a];
    rhs += weights[a] * rhs_i[a];
  }
  lhs /= sw;
  rhs /= sw;
  double v_diff = 0.0, v_lhs = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const double dd = lhs_i[a] - rhs_i[a] - (lhs - rhs);
    const double dl = lhs_i[a] - lhs;
    v_diff += weights[a] * weights[a] * dd * dd;
    v_lhs += weights[a] * weights[a] * dl * dl;
  }
  const double ess = sw * sw / sw2;
  const double correction = ess > 1.0 ? ess / (ess - 1.0) : 1.0;
  PdeReport rep;
  rep.t = grid.node(kt);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.residual = std::abs(lhs - rhs);
  rep.stderr_ = std::sqrt(correction * v_diff) / sw;
  rep.lhs_stderr = std::sqrt(correction * v_lhs) / sw;
  rep.slice_size = ess;
  rep.approximate = options.bandwidth.has_value();
  return rep;
}

void write_lln_csv(std::ostream& out, const LlnReport& report, const std::vector<TestFunctional>& tests) {
  out << "quantity,n,mean,spread\n";
  char buf[256];
  for (const auto& row : report.rows) {
    for (std::size_t f = 0; f < tests.size(); ++f) {
      std::snprintf(buf, sizeof buf, "error_%s,%zu,%.17g,%.17g\n", tests[f].name.c_str(), row.n, row.error_mean[f],
                    row.error_spread[f]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "d_bl,%zu,%.17g,%.17g\n", row.n, row.bl_mean, row.bl_spread);
    out << buf;
  }
  for (std::size_t f = 0; f < tests.size(); ++f) {
    std::snprintf(buf, sizeof buf, "slope_%s,0,%.17g,0\n", tests[f].name.c_str(), report.slopes[f]);
    out << buf;
    std::snprintf(buf, sizeof buf, "baseline_%s,0,%.17g,0\n", tests[f].name.c_str(), report.baseline[f]);
    out << buf;
  }
}

}  // namespace mkv
