#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mkv/cloud.hpp"
#include "mkv/expr.hpp"
#include "mkv/models.hpp"
#include "mkv/rng.hpp"

namespace mkv {

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

/// Mean of D^{nu,omega} over the atoms of mu_samples.
Estimate gamma_estimate(const ModelSpec& model, const ParticleCloud& nu, const ParticleCloud& mu_samples);
/// I(Q_eta | P) from Q_eta samples. Same formula as gamma_estimate.
Estimate entropy_vs_P(const ModelSpec& model, const ParticleCloud& eta, const ParticleCloud& samples_of_q_eta);

/// The nu of H_nu: a cloud plus, optionally, a different drift to evaluate D^nu with.
struct RateComparison {
  std::optional<ParticleCloud> cloud;
  std::optional<ModelSpec> model;
};

struct RateReport {
  Estimate gamma_nu_mu;    // Gamma_nu(Q_eta)
  Estimate entropy_vs_P;   // I(Q_eta | P)
  Estimate h_nu_mu;        // H_nu(Q_eta)
  Estimate h_mu_mu;        // H(Q_eta), nu replaced by the sample cloud itself
  double kappa = 0.0;      // T f_sup f_sl / h_*^2
};

/// Samples Q_eta on fresh noise and evaluates the rate quantities there. Without a
/// comparison, nu = eta and h_nu_mu is exactly zero.
RateReport rate_H(const ModelSpec& model, const ParticleCloud& eta, std::size_t m, const RngStream& seed,
                  const RateComparison& compare = {});

/// BL functional of a (path, media) atom: g applied to a 1-Lipschitz path statistic.
struct TestFunctional {
  enum class Statistic { Terminal, TimeAverage, RunningMax };
  std::string name;
  Statistic statistic = Statistic::Terminal;
  ScalarFn g = ScalarFn::sine();

  double operator()(const PathView& x) const;
  /// sup |g| + Lip(g); each statistic is 1-Lipschitz in the sup norm.
  double bl_norm() const { return g.sup_abs() + g.lipschitz(); }
  bool operator==(const TestFunctional&) const = default;
};

double integrate(const TestFunctional& test, const ParticleCloud& cloud);

struct LlnRow {
  std::size_t n = 0;
  std::vector<double> error_mean;    // per test functional, over replicates
  std::vector<double> error_spread;  // sample sd over replicates
  double bl_mean = 0.0;
  double bl_spread = 0.0;
};

struct LlnReport {
  std::vector<LlnRow> rows;
  std::vector<double> slopes;  // least-squares slope of log error_mean against log N
  std::vector<double> baseline;  // per test functional |int F dnu - int F dnu'| for a fresh same-size nu'
};

struct LlnOptions {
  std::size_t lp_cap = 1200;
};

LlnReport lln_report(const ModelSpec& model, const ParticleCloud& nu_star, const std::vector<std::size_t>& n_list,
                     const std::vector<TestFunctional>& tests, std::size_t replicates, const RngStream& seed,
                     const LlnOptions& options = {});

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct PdeOptions {
  /// Gaussian kernel bandwidth for continuous media; empty selects exact slices.
  std::optional<double> bandwidth;
};

struct PdeReport {
  double t = 0.0;
  double lhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double stderr_ = 0.0;  // of the per-atom difference lhs_i - rhs_i
  double slice_size = 0.0;  // atom count, or effective sample size for kernel weights
  bool approximate = false;
};

/// Weak form E[phi(x_t) - phi(x_0)] = int_0^t E[f phi'(x_s) + h^2/2 phi''(x_s)] ds over
/// the omega-slice of the cloud, trapezoid rule on grid nodes.
PdeReport pde_residual(const ModelSpec& model, const ParticleCloud& nu_star, const ScalarFn& phi,
                       const MediaSample& omega, double t, const PdeOptions& options = {});

void write_lln_csv(std::ostream& out, const LlnReport& report, const std::vector<TestFunctional>& tests);

}  // namespace mkv
