#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mkv/cloud.hpp"
#include "mkv/expr.hpp"
#include "mkv/metrics.hpp"
#include "mkv/rng.hpp"

namespace mkv {

/// f(t, x, nu, omega). Implementations must be pure and read x and nu only at
/// times <= t.
using DriftFn =
    std::function<double(double t, const PathView& x, const CloudView& nu, std::span<const double> omega)>;

/// Declared model constants. They are assumptions about f and h, audited at
/// runtime rather than derived.
struct DeclaredBounds {
  double f_sup = 0.0;
  double f_sl = 0.0;
  double h_star = 1.0;
  double h_sup = 1.0;
  bool operator==(const DeclaredBounds&) const = default;
};

// Initial-segment laws on [-tau, 0].
struct ConstantInit {
  double level = 0.0;
  bool operator==(const ConstantInit&) const = default;
};
struct UniformLevelInit {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const UniformLevelInit&) const = default;
};
/// start + sigma * W(s + tau) on [-tau, 0].
struct BrownianSegmentInit {
  double start = 0.0;
  double sigma = 0.0;
  bool operator==(const BrownianSegmentInit&) const = default;
};
using InitLaw = std::variant<ConstantInit, UniformLevelInit, BrownianSegmentInit>;

// Media laws, all compactly supported.
struct PointMassMedia {
  std::vector<double> point;
  bool operator==(const PointMassMedia&) const = default;
};
struct UniformBoxMedia {
  std::vector<double> lo;
  std::vector<double> hi;
  bool operator==(const UniformBoxMedia&) const = default;
};
struct DiscreteMedia {
  std::vector<std::vector<double>> atoms;
  bool operator==(const DiscreteMedia&) const = default;
};
using MediaLaw = std::variant<PointMassMedia, UniformBoxMedia, DiscreteMedia>;

std::size_t media_dim(const MediaLaw& law);
/// sup |omega_k| over the support.
double media_coord_bound(const MediaLaw& law, std::size_t k);
/// Largest Euclidean distance between two support points.
double media_diameter(const MediaLaw& law);
/// Support atoms of a point-mass or discrete law; empty for continuous laws.
std::vector<std::vector<double>> media_atoms(const MediaLaw& law);

/// h(omega) = base + slope * omega_1.
struct Diffusion {
  double base = 1.0;
  double slope = 0.0;
  double operator()(std::span<const double> omega) const { return base + slope * omega[0]; }
  bool operator==(const Diffusion&) const = default;
};

/// Interaction form F(x, y, w, s) = coupling * shape(x - y) + media_gain * w_1
/// with delay tau_bar(w, s) = delay_base + delay_slope * |w - s|.
struct KuramotoParams {
  ScalarFn shape = ScalarFn::sine();
  double coupling = 1.0;
  double media_gain = 1.0;
  double delay_base = 0.0;
  double delay_slope = 0.0;
  bool operator==(const KuramotoParams&) const = default;
};

/// f(t, mu, w) = int_{t - window(w_1)}^t int kernel(t - s) weight(s_1) rate(y(s)) dmu ds.
struct GlParams {
  ScalarFn kernel = ScalarFn::exp_decay();
  ScalarFn weight = ScalarFn::constant(1.0);
  ScalarFn rate = ScalarFn::clip(0.0, 1.0);
  ScalarFn window = ScalarFn::constant(0.1);
  bool operator==(const GlParams&) const = default;
};

/// Everything a built-in model needs besides its drift.
struct ModelCommon {
  double tau = 0.0;
  double T = 1.0;
  Diffusion diffusion;
  InitLaw init_law = ConstantInit{};
  MediaLaw media_law = PointMassMedia{{0.0}};
};

struct ModelSpec {
  std::string name;
  DriftFn drift;
  Diffusion diffusion;
  InitLaw init_law;
  MediaLaw media_law;
  DeclaredBounds bounds;
  MetricKind metric_kind = SupPlusEuclid{};
  double tau = 0.0;
  double T = 1.0;
  std::size_t d = 1;
  /// Declared: the drift never reads its measure argument.
  bool measure_free = false;
  /// When set, eval_drift throws BoundViolation on |f| > f_sup.
  bool audit = false;
  /// When positive and smaller than the cloud, the integrators pass f a uniform
  /// subset of this many atoms, redrawn at every step. Biased; 0 keeps all atoms.
  std::size_t drift_atoms = 0;

  double h(std::span<const double> omega) const { return diffusion(omega); }
};

/// Checks the grid against (tau, T). Throws GridMismatch.
void require_model_grid(const ModelSpec& model, const TimeGrid& grid);

double eval_drift(const ModelSpec& model, double t, const PathView& x, const CloudView& nu,
                  std::span<const double> omega);

double kuramoto_drift(const KuramotoParams& params, double tau, double t, const PathView& x, const CloudView& nu,
                      std::span<const double> omega);
double gl_drift(const GlParams& params, double tau, double t, const PathView& x, const CloudView& nu,
                std::span<const double> omega);

/// Values of the initial segment on the nodes of [-tau, 0].
std::vector<double> sample_initial(const ModelSpec& model, const TimeGrid& grid, const RngStream& rng);
MediaSample sample_media(const ModelSpec& model, const RngStream& rng);

ModelSpec make_zero_model(const ModelCommon& common);
ModelSpec make_constant_model(double c, const ModelCommon& common);
/// f = gain * omega_1.
ModelSpec make_media_drift_model(double gain, const ModelCommon& common);
/// f = strength * sin(x(t)) + gain * omega_1. Path dependent but measure free.
ModelSpec make_local_sine_model(double strength, double gain, const ModelCommon& common);
ModelSpec make_kuramoto_model(const KuramotoParams& params, const ModelCommon& common);
ModelSpec make_gl_model(const GlParams& params, const ModelCommon& common);

struct AuditReport {
  std::size_t probes = 0;
  double max_ratio = 0.0;
  double declared_f_sl = 0.0;
  double max_abs_drift = 0.0;
  double declared_f_sup = 0.0;
  double min_h = 0.0;
  double max_h = 0.0;
  bool lipschitz_violation = false;
  bool drift_bound_violation = false;
  bool diffusion_violation = false;
  bool ok() const { return !lipschitz_violation && !drift_bound_violation && !diffusion_violation; }
};

/// Empirical super-Lipschitz ratio |f(t,x,mu,w) - f(t,y,nu,w)| / (||x-y|| + d_BL^t(mu,nu))
/// over random probe pairs. Flags a violation when it exceeds f_sl by more than 5%.
AuditReport lipschitz_audit(const ModelSpec& model, const TimeGrid& grid, std::size_t probes,
                            const RngStream& rng);

}  // namespace mkv
