#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mkv/cloud.hpp"
#include "mkv/rng.hpp"

namespace mkv {

/// Sup norm of the path on [-tau, t] plus Euclidean media distance.
struct SupPlusEuclid {};

/// sqrt(|w - w'|^2 + S^2) with S the sup of |x(s) - x'(u)| over node pairs in
/// [0, t]^2 whose index gap is at most ceil(K |w - w'| / dt).
struct KuramotoWindow {
  double K = 0.0;
};

using MetricKind = std::variant<SupPlusEuclid, KuramotoWindow>;

MetricKind kuramoto_window(double K);

double dist_t(const PathView& x, std::span<const double> wx, const PathView& y,
              std::span<const double> wy, double t, const MetricKind& kind);

double dist_t(const CloudView& a, std::size_t i, const CloudView& b, std::size_t j, double t,
              const MetricKind& kind);

enum class BlMode { ExactLP, DictionaryLowerBound };

/// Dual witness: test-function values on the atoms of A followed by those of B,
/// with Lipschitz budget `lipschitz` and sup budget `bound`.
struct BlCertificate {
  std::vector<double> phi;
  double lipschitz = 0.0;
  double bound = 0.0;
};

struct BlResult {
  double value = 0.0;
  BlMode mode = BlMode::ExactLP;
  std::optional<BlCertificate> certificate;
  double upper_bound = 2.0;  // for ExactLP: a primal bound, value <= optimum <= upper_bound
  std::size_t iterations = 0;
};

struct BlOptions {
  std::size_t lp_cap = 1200;
  double gap_tolerance = 1e-10;
  std::size_t max_iterations = 80;
};

/// Exact Dudley distance between the uniform empirical measures of A and B on
/// [-tau, t]. Throws SupportTooLarge when |A| + |B| exceeds the cap.
BlResult bl_distance_exact(const ParticleCloud& a, const ParticleCloud& b, double t,
                           const MetricKind& kind, const BlOptions& options = {});

/// Lower bound from a seeded dictionary of BL-norm-1 test functions. The k-th
/// function depends only on (seed, k), so larger dictionaries extend smaller ones.
BlResult bl_distance_dictionary(const ParticleCloud& a, const ParticleCloud& b, double t,
                                const MetricKind& kind, std::size_t dict_size,
                                const RngStream& seed);

/// Exact when |A| + |B| fits the cap, dictionary lower bound otherwise.
BlResult bl_distance(const ParticleCloud& a, const ParticleCloud& b, double t, const MetricKind& kind,
                     const BlOptions& options, std::size_t dict_size, const RngStream& seed);

/// mean_i min(dist_t(A_i, B_i), 2): the bound from pairing atom i with atom i.
double coupling_upper_bound(const ParticleCloud& a, const ParticleCloud& b, double t,
                            const MetricKind& kind);

/// Per-pair truncated distances min(dist_t(A_i, B_i), 2).
std::vector<double> coupling_terms(const ParticleCloud& a, const ParticleCloud& b, double t,
                                   const MetricKind& kind);

struct CertificateCheck {
  double objective = 0.0;
  double lipschitz_violation = 0.0;  // max over pairs of |phi_i - phi_j| - L d_ij
  double bound_violation = 0.0;      // max over atoms of |phi_i| - B
  double budget_violation = 0.0;     // L + B - 1
  bool feasible(double tol = 1e-9) const {
    return lipschitz_violation <= tol && bound_violation <= tol && budget_violation <= tol;
  }
};

CertificateCheck check_certificate(const ParticleCloud& a, const ParticleCloud& b, double t,
                                   const MetricKind& kind, const BlCertificate& cert);

/// Row-major (|A|+|B|)^2 matrix of dist_t over the combined support, A first.
std::vector<double> support_distances(const ParticleCloud& a, const ParticleCloud& b, double t,
                                      const MetricKind& kind);

/// Plain-text dump of the BL linear program: variables phi_1..phi_n, L, B;
/// one objective row then one row per constraint in the form
/// `<name> <sense> <rhs> | <var>:<coef> ...`.
void write_lp_table(std::ostream& out, const ParticleCloud& a, const ParticleCloud& b, double t,
                    const MetricKind& kind);

}  // namespace mkv
