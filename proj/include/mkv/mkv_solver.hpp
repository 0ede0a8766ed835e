#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mkv/cloud.hpp"
#include "mkv/error.hpp"
#include "mkv/models.hpp"
#include "mkv/rng.hpp"
#include "mkv/simulate.hpp"

namespace mkv {

struct PicardRecord {
  std::size_t iteration = 0;
  double coupling_dist = 0.0;       // coupling bound on d^T_BL(nu_k, nu_{k-1})
  double lp_dist_subsample = 0.0;   // exact d^T_BL on a common subsample
  double seconds = 0.0;
};

struct PicardTrace {
  std::vector<PicardRecord> iterates;
  bool converged = false;
  double final_residual = 0.0;  // coupling distance of the last step
};

void write_trace_csv(std::ostream& out, const PicardTrace& trace);

struct SolverOptions {
  std::size_t particles = 1000;
  double tol = 0.02;
  std::size_t max_iter = 50;
  std::size_t lp_subsample = 200;
};

struct MkvSolution {
  ParticleCloud cloud;
  PicardTrace trace;
};

/// Thrown when max_iter is reached; carries the last iterate and its trace.
class NotConverged : public Error {
 public:
  explicit NotConverged(MkvSolution solution)
      : Error(ErrorCode::NotConverged, "Picard iteration hit max_iter"), solution_(std::move(solution)) {}
  const MkvSolution& solution() const { return solution_; }

 private:
  MkvSolution solution_;
};

/// One application of nu -> Q_nu on the shared bank.
ParticleCloud picard_step(const ModelSpec& model, const ParticleCloud& nu_k, const NoiseBank& bank);

/// Picard iteration from the reference cloud of the bank seeded by `seed`, stopping
/// once the coupling bound between successive iterates drops below tol.
MkvSolution solve_mkv(const ModelSpec& model, GridPtr grid, const SolverOptions& options, const RngStream& seed);

struct ResidualOptions {
  std::size_t subsample = 400;
  std::size_t repeats = 3;
};

struct ResidualReport {
  double residual = 0.0;
  double residual_stderr = 0.0;
  double baseline = 0.0;
  double baseline_stderr = 0.0;
  std::size_t subsample = 0;
  std::size_t repeats = 0;
};

/// Mean over repeats r of d^T_BL(cloud, Q_cloud on fresh bank r), on common subsamples.
/// The baseline replaces the cloud by Q_cloud simulated on the bank keyed by `seed`,
/// so it is a two-sample distance of Q_cloud. When `seed` is the seed the cloud was
/// solved with, the two quantities differ by at most the fixed-point defect.
ResidualReport fixed_point_residual(const ModelSpec& model, const ParticleCloud& cloud, const RngStream& seed,
                                    const ResidualOptions& options = {});

struct ContractionRow {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double input_dist = 0.0;  // d^t_BL(mu, nu)
  double stderr_ = 0.0;
  bool hard_violation = false;  // lhs > rhs + 3 stderr
};

/// exp(f_sl T) f_sl.
double gronwall_constant(const ModelSpec& model);

/// lhs = d^t_BL(Q mu, Q nu) on a shared bank, rhs = C int_0^t d^s_BL(mu, nu) ds by the
/// trapezoid rule over {0} and the checkpoints. stderr_ is a bootstrap over particles.
std::vector<ContractionRow> contraction_diagnostic(const ModelSpec& model, const ParticleCloud& mu,
                                                   const ParticleCloud& nu, const std::vector<double>& checkpoints,
                                                   const RngStream& seed, std::size_t bootstrap = 8);

struct CompositionRow {
  std::size_t n = 0;
  double distance = 0.0;  // d^T_BL(Q^n mu, Q^n nu)
  double bound = 0.0;     // (C T)^n / n! d^T_BL(mu, nu)
};

/// n-fold composed steps against one bank.
std::vector<CompositionRow> composition_decay(const ModelSpec& model, const ParticleCloud& mu,
                                              const ParticleCloud& nu, std::size_t n_max, const RngStream& seed);

}  // namespace mkv
