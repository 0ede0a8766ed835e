#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mkv/cloud.hpp"
#include "mkv/models.hpp"
#include "mkv/rng.hpp"

namespace mkv {

/// Left-point sums over the [0, t] part of the grid:
/// ito = sum f_k (y_{k+1} - y_k), quad = sum f_k^2 dt, both divided by h^2.
struct GirsanovSums {
  double ito = 0.0;
  double quad = 0.0;

  double functional() const { return ito - 0.5 * quad; }
  double log_martingale(double alpha) const { return alpha * ito - 0.5 * alpha * alpha * quad; }
};

/// Sums after each of the first `steps` steps (entry k covers steps 0..k-1, entry 0 is empty).
std::vector<GirsanovSums> girsanov_partial_sums(const ModelSpec& model, const CloudView& nu, const PathView& y,
                                                std::span<const double> omega, std::size_t steps);
GirsanovSums girsanov_sums(const ModelSpec& model, const CloudView& nu, const PathView& y,
                           std::span<const double> omega, double s);

/// D^{nu,omega}(y_T).
double girsanov_functional(const ModelSpec& model, const ParticleCloud& nu, const SamplePath& y,
                           const MediaSample& omega, const TimeGrid& grid);
/// D over atom i of `paths`.
double girsanov_functional(const ModelSpec& model, const CloudView& nu, const ParticleCloud& paths, std::size_t i);

double log_exp_martingale(const ModelSpec& model, const ParticleCloud& nu, double alpha, const SamplePath& y,
                          const MediaSample& omega, double s);
/// M^{omega,alpha}(s), computed in log space and exponentiated once.
double exp_martingale_value(const ModelSpec& model, const ParticleCloud& nu, double alpha, const SamplePath& y,
                            const MediaSample& omega, double s);

struct GirsanovStats {
  double alpha = 0.0;
  double time = 0.0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double bound = 0.0;  // 0 when no bound applies
  std::size_t samples = 0;
  bool pass = false;
};

/// exp{|alpha^2 - alpha| T f_sup^2 / (2 h_*^2)}.
double moment_bound(const ModelSpec& model, double alpha);

/// MC mean of M^{alpha}(s) over M fresh P-samples, s = T by default.
GirsanovStats mc_martingale_mean(const ModelSpec& model, const ParticleCloud& nu, double alpha, std::size_t m,
                                 const RngStream& seed);
/// Mean-one check for every (alpha, s) pair on one shared set of P-samples.
std::vector<GirsanovStats> mc_martingale_sweep(const ModelSpec& model, const ParticleCloud& nu,
                                               const std::vector<double>& alphas,
                                               const std::vector<double>& times, std::size_t m,
                                               const RngStream& seed);
/// MC estimate of E_P exp(alpha D) against moment_bound.
GirsanovStats moment_bound_check(const ModelSpec& model, const ParticleCloud& nu, double alpha, std::size_t m,
                                 const RngStream& seed);
std::vector<GirsanovStats> moment_bound_sweep(const ModelSpec& model, const ParticleCloud& nu,
                                              const std::vector<double>& alphas, std::size_t m,
                                              const RngStream& seed);

/// sum_i D^{cloud, omega_i}(x^i): log dQ_N/dP^N at the cloud.
double log_rn_coupled(const ModelSpec& model, const ParticleCloud& cloud);

void write_stats_csv(std::ostream& out, const std::vector<GirsanovStats>& rows);

}  // namespace mkv
