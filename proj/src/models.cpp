#include "mkv/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mkv/error.hpp"
#include "mkv/parallel.hpp"

namespace mkv {
namespace {

constexpr double kTimeSlack = 1e-12;

// y(s) by linear interpolation, never reading past the node at or after s.
double interpolate(const PathView& y, std::size_t k, double w) {
  return w > 0.0 ? (1.0 - w) * y[k] + w * y[k + 1] : y[k];
}

std::pair<std::size_t, double> locate(const TimeGrid& grid, double s) {
  const std::size_t k = restrict_index(grid, s);
  if (k == grid.last_index()) return {k, 0.0};
  const double w = (s - grid.node(k)) / grid.dt();
  return {k, w > 0.0 ? std::min(w, 1.0) : 0.0};
}

std::pair<double, double> diffusion_range(const Diffusion& h, const MediaLaw& law) {
  const double reach = std::abs(h.slope) * media_coord_bound(law, 0);
  return {h.base - reach, h.base + reach};
}

ModelSpec base_model(std::string name, const ModelCommon& common) {
  ModelSpec m;
  m.name = std::move(name);
  m.diffusion = common.diffusion;
  m.init_law = common.init_law;
  m.media_law = common.media_law;
  m.tau = common.tau;
  m.T = common.T;
  m.d = media_dim(common.media_law);
  if (m.d == 0) throw Error(ErrorCode::DimensionMismatch, "media law has dimension 0");
  const auto [h_lo, h_hi] = diffusion_range(common.diffusion, common.media_law);
  if (!(h_lo > 0.0)) throw Error(ErrorCode::BoundsError, "diffusion must stay above a positive h_*");
  m.bounds.h_star = h_lo;
  m.bounds.h_sup = h_hi;
  return m;
}

std::vector<double> sample_brownian_path(const ModelSpec& model, const TimeGrid& grid, SplitMix64& g,
                                         const RngStream& stream, double scale) {
  std::vector<double> v(grid.size());
  const auto init = sample_initial(model, grid, stream);
  std::copy(init.begin(), init.end(), v.begin());
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = scale * std::sqrt(grid.dt());
  for (std::size_t k = grid.zero_index(); k < grid.last_index(); ++k) v[k + 1] = v[k] + sd * normal(g);
  return v;
}

}  // namespace

std::size_t media_dim(const MediaLaw& law) {
  return std::visit(
      [](const auto& l) -> std::size_t {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PointMassMedia>) return l.point.size();
        if constexpr (std::is_same_v<L, UniformBoxMedia>) return l.lo.size();
        if constexpr (std::is_same_v<L, DiscreteMedia>) return l.atoms.empty() ? 0 : l.atoms.front().size();
      },
      law);
}

double media_coord_bound(const MediaLaw& law, std::size_t k) {
  return std::visit(
      [k](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PointMassMedia>) return std::abs(l.point.at(k));
        if constexpr (std::is_same_v<L, UniformBoxMedia>) return std::max(std::abs(l.lo.at(k)), std::abs(l.hi.at(k)));
        if constexpr (std::is_same_v<L, DiscreteMedia>) {
          double b = 0.0;
          for (const auto& a : l.atoms) b = std::max(b, std::abs(a.at(k)));
          return b;
        }
      },
      law);
}

double media_diameter(const MediaLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PointMassMedia>) return 0.0;
        if constexpr (std::is_same_v<L, UniformBoxMedia>) {
          double s = 0.0;
          for (std::size_t k = 0; k < l.lo.size(); ++k) s += (l.hi[k] - l.lo[k]) * (l.hi[k] - l.lo[k]);
          return std::sqrt(s);
        }
        if constexpr (std::is_same_v<L, DiscreteMedia>) {
          double best = 0.0;
          for (const auto& a : l.atoms) {
            for (const auto& b : l.atoms) {
              double s = 0.0;
              for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
              best = std::max(best, std::sqrt(s));
            }
          }
          return best;
        }
      },
      law);
}

std::vector<std::vector<double>> media_atoms(const MediaLaw& law) {
  if (const auto* p = std::get_if<PointMassMedia>(&law)) return {p->point};
  if (const auto* d = std::get_if<DiscreteMedia>(&law)) return d->atoms;
  return {};
}

void require_model_grid(const ModelSpec& model, const TimeGrid& grid) {
  if (std::abs(grid.tau() - model.tau) > 1e-12 || std::abs(grid.horizon() - model.T) > 1e-12) {
    throw Error(ErrorCode::GridMismatch, "grid [-tau, T] does not match the model horizon");
  }
}

double eval_drift(const ModelSpec& model, double t, const PathView& x, const CloudView& nu,
                  std::span<const double> omega) {
  if (!(t >= -kTimeSlack && t <= model.T + kTimeSlack)) {
    throw Error(ErrorCode::OutOfRange, "drift evaluated outside [0, T]");
  }
  if (&x.grid() != nu.grid && !x.grid().same_as(*nu.grid)) {
    throw Error(ErrorCode::GridMismatch, "path and cloud live on different grids");
  }
  if (omega.size() != model.d) throw Error(ErrorCode::DimensionMismatch, "media dimension differs from model");
  const double v = model.drift(t, x, nu, omega);
  if (model.audit && !(std::abs(v) <= model.bounds.f_sup * (1.0 + 1e-12) + 1e-15)) {
    throw Error(ErrorCode::BoundViolation, "drift value exceeds declared f_sup");
  }
  return v;
}

double kuramoto_drift(const KuramotoParams& params, double tau, double t, const PathView& x, const CloudView& nu,
                      std::span<const double> omega) {
  const double xt = x.value_at(t);
  const TimeGrid& grid = *nu.grid;
  const double media_term = params.media_gain * omega[0];
  auto check_delay = [tau](double delay) {
    if (!(delay >= 0.0 && delay <= tau + kTimeSlack)) {
      throw Error(ErrorCode::DelayOutOfRange, "delay outside [0, tau]");
    }
  };
  // Running mean keeps an N-fold replicated atom exactly equal to the single-atom value.
  double mean = 0.0;
  if (params.delay_slope == 0.0) {
    check_delay(params.delay_base);
    const auto [k, w] = locate(grid, std::max(t - params.delay_base, -grid.tau()));
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double y = interpolate(nu.path(j), k, w);
      const double f = params.coupling * params.shape(xt - y) + media_term;
      mean += (f - mean) / static_cast<double>(j + 1);
    }
    return mean;
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const auto sigma = nu.media_of(j);
    double dist = 0.0;
    for (std::size_t c = 0; c < sigma.size(); ++c) dist += (omega[c] - sigma[c]) * (omega[c] - sigma[c]);
    const double delay = params.delay_base + params.delay_slope * std::sqrt(dist);
    check_delay(delay);
    const auto [k, w] = locate(grid, std::max(t - delay, -grid.tau()));
    const double y = interpolate(nu.path(j), k, w);
    const double f = params.coupling * params.shape(xt - y) + media_term;
    mean += (f - mean) / static_cast<double>(j + 1);
  }
  return mean;
}

double gl_drift(const GlParams& params, double tau, double t, const PathView&, const CloudView& nu,
                std::span<const double> omega) {
  const double window = params.window(omega[0]);
  if (!(window > 0.0 && window <= tau + kTimeSlack)) {
    throw Error(ErrorCode::DelayOutOfRange, "memory window outside (0, tau]");
  }
  const TimeGrid& grid = *nu.grid;
  const double a = std::max(t - window, -grid.tau());
  // Quadrature points: a, the nodes strictly inside (a, t), and t.
  std::vector<double> times{a};
  for (std::size_t k = ceil_index(grid, a); k <= grid.last_index() && grid.node(k) < t - kTimeSlack; ++k) {
    if (grid.node(k) > a + kTimeSlack) times.push_back(grid.node(k));
  }
  times.push_back(t);
  std::vector<std::pair<std::size_t, double>> where(times.size());
  std::vector<double> kern(times.size());
  for (std::size_t m = 0; m < times.size(); ++m) {
    where[m] = locate(grid, times[m]);
    kern[m] = params.kernel(t - times[m]);
  }
  double mean = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const PathView y = nu.path(j);
    const double wj = params.weight(nu.media_of(j)[0]);
    double integral = 0.0;
    double prev = kern[0] * params.rate(interpolate(y, where[0].first, where[0].second));
    for (std::size_t m = 1; m < times.size(); ++m) {
      const double cur = kern[m] * params.rate(interpolate(y, where[m].first, where[m].second));
      integral += 0.5 * (prev + cur) * (times[m] - times[m - 1]);
      prev = cur;
    }
    const double f = wj * integral;
    mean += (f - mean) / static_cast<double>(j + 1);
  }
  return mean;
}

std::vector<double> sample_initial(const ModelSpec& model, const TimeGrid& grid, const RngStream& rng) {
  std::vector<double> seg(grid.past_steps() + 1);
  SplitMix64 g = rng.engine();
  std::visit(
      [&](const auto& law) {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, ConstantInit>) {
          std::fill(seg.begin(), seg.end(), law.level);
        } else if constexpr (std::is_same_v<L, UniformLevelInit>) {
          std::fill(seg.begin(), seg.end(), law.lo + (law.hi - law.lo) * uniform01(g));
        } else {
          std::normal_distribution<double> normal(0.0, 1.0);
          const double sd = law.sigma * std::sqrt(grid.dt());
          seg[0] = law.start;
          for (std::size_t k = 1; k < seg.size(); ++k) seg[k] = seg[k - 1] + sd * normal(g);
        }
      },
      model.init_law);
  return seg;
}

MediaSample sample_media(const ModelSpec& model, const RngStream& rng) {
  SplitMix64 g = rng.engine();
  return std::visit(
      [&](const auto& law) -> MediaSample {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, PointMassMedia>) {
          return MediaSample(law.point);
        } else if constexpr (std::is_same_v<L, UniformBoxMedia>) {
          std::vector<double> w(law.lo.size());
          for (std::size_t k = 0; k < w.size(); ++k) w[k] = law.lo[k] + (law.hi[k] - law.lo[k]) * uniform01(g);
          return MediaSample(std::move(w));
        } else {
          const std::size_t n = law.atoms.size();
          const std::size_t k = std::min(n - 1, static_cast<std::size_t>(uniform01(g) * static_cast<double>(n)));
          return MediaSample(law.atoms[k]);
        }
      },
      model.media_law);
}

ModelSpec make_zero_model(const ModelCommon& common) {
  ModelSpec m = base_model("zero", common);
  m.drift = [](double, const PathView&, const CloudView&, std::span<const double>) { return 0.0; };
  m.bounds.f_sup = 0.0;
  m.bounds.f_sl = 0.0;
  m.measure_free = true;
  return m;
}

ModelSpec make_constant_model(double c, const ModelCommon& common) {
  ModelSpec m = base_model("constant", common);
  m.drift = [c](double, const PathView&, const CloudView&, std::span<const double>) { return c; };
  m.bounds.f_sup = std::abs(c);
  m.bounds.f_sl = 0.0;
  m.measure_free = true;
  return m;
}

ModelSpec make_media_drift_model(double gain, const ModelCommon& common) {
  ModelSpec m = base_model("media_drift", common);
  m.drift = [gain](double, const PathView&, const CloudView&, std::span<const double> w) { return gain * w[0]; };
  m.bounds.f_sup = std::abs(gain) * media_coord_bound(common.media_law, 0);
  m.bounds.f_sl = 0.0;
  m.measure_free = true;
  return m;
}

ModelSpec make_local_sine_model(double strength, double gain, const ModelCommon& common) {
  ModelSpec m = base_model("local_sine", common);
  m.drift = [strength, gain](double t, const PathView& x, const CloudView&, std::span<const double> w) {
    return strength * std::sin(x.value_at(t)) + gain * w[0];
  };
  m.bounds.f_sup = std::abs(strength) + std::abs(gain) * media_coord_bound(common.media_law, 0);
  m.bounds.f_sl = std::abs(strength);
  m.measure_free = true;
  return m;
}

ModelSpec make_kuramoto_model(const KuramotoParams& params, const ModelCommon& common) {
  ModelSpec m = base_model("kuramoto", common);
  if (!std::isfinite(params.shape.sup_abs())) {
    throw Error(ErrorCode::BoundsError, "Kuramoto interaction shape must be bounded");
  }
  if (params.delay_base < 0.0 || params.delay_slope < 0.0 ||
      params.delay_base + params.delay_slope * media_diameter(common.media_law) > common.tau + kTimeSlack) {
    throw Error(ErrorCode::DelayOutOfRange, "delay range must lie within [0, tau]");
  }
  const double tau = common.tau;
  m.drift = [params, tau](double t, const PathView& x, const CloudView& nu, std::span<const double> w) {
    return kuramoto_drift(params, tau, t, x, nu, w);
  };
  const double k = std::abs(params.coupling);
  m.bounds.f_sup = k * params.shape.sup_abs() + std::abs(params.media_gain) * media_coord_bound(common.media_law, 0);
  m.bounds.f_sl = k * (params.shape.sup_abs() + params.shape.lipschitz());
  m.metric_kind = params.delay_slope > 0.0 ? MetricKind{KuramotoWindow{params.delay_slope}} : MetricKind{SupPlusEuclid{}};
  return m;
}

ModelSpec make_gl_model(const GlParams& params, const ModelCommon& common) {
  ModelSpec m = base_model("gl", common);
  if (!(common.tau > 0.0)) throw Error(ErrorCode::BoundsError, "the memory model needs tau > 0");
  const double tau = common.tau;
  m.drift = [params, tau](double t, const PathView& x, const CloudView& nu, std::span<const double> w) {
    return gl_drift(params, tau, t, x, nu, w);
  };
  const double ksup = params.kernel.sup_abs();
  m.bounds.f_sup = tau * ksup * params.weight.sup_abs() * params.rate.sup_abs();
  m.bounds.f_sl = tau * ksup * (params.weight.sup_abs() * params.rate.lipschitz() + params.weight.lipschitz());
  return m;
}

AuditReport lipschitz_audit(const ModelSpec& model, const TimeGrid& grid, std::size_t probes,
                            const RngStream& rng) {
  require_model_grid(model, grid);
  if (probes == 0) throw Error(ErrorCode::BoundsError, "audit needs at least one probe");
  const GridPtr gp = std::make_shared<const TimeGrid>(grid);
  constexpr std::size_t kAtoms = 3;

  struct Probe {
    double ratio = 0.0;
    double max_f = 0.0;
    double h = 0.0;
  };
  std::vector<Probe> out(probes);
  parallel_for(probes, [&](std::size_t p) {
    const RngStream base = rng.with(p, Purpose::Probe);
    SplitMix64 g = base.engine();
    auto sub = [&](std::uint64_t k) { return RngStream{base.master_seed, base.replicate * 1000003 + p, k, Purpose::Probe}; };
    const std::size_t k_t = grid.zero_index() +
                            std::min(grid.future_steps(), static_cast<std::size_t>(uniform01(g) * (grid.future_steps() + 1)));
    const double t = grid.node(k_t);
    const MediaSample omega = sample_media(model, sub(1));
    const int kind = static_cast<int>(uniform01(g) * 3.0);  // 0: path only, 1: measure only, 2: both
    const double eps = std::exp(std::log(1e-3) + uniform01(g) * (std::log(1.0) - std::log(1e-3)));
    const double freq = 1.0 + 6.0 * uniform01(g);
    const double phase = 6.283185307179586 * uniform01(g);
    auto perturb = [&](std::vector<double> v, double amp) {
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += amp * std::sin(freq * grid.node(k) + phase);
      return v;
    };
    const double scale = 0.2 + 1.8 * uniform01(g);

    const std::vector<double> x = sample_brownian_path(model, grid, g, sub(2), scale);
    const std::vector<double> y = kind == 1 ? x : perturb(x, eps);

    std::vector<double> mu_vals, nu_vals, media;
    for (std::size_t a = 0; a < kAtoms; ++a) {
      auto path = sample_brownian_path(model, grid, g, sub(10 + a), scale);
      const MediaSample w = sample_media(model, sub(20 + a));
      mu_vals.insert(mu_vals.end(), path.begin(), path.end());
      auto moved = kind == 0 ? path : perturb(path, eps * (0.5 + uniform01(g)));
      nu_vals.insert(nu_vals.end(), moved.begin(), moved.end());
      media.insert(media.end(), w.coords.begin(), w.coords.end());
    }
    const ParticleCloud mu(gp, model.d, mu_vals, media);
    const ParticleCloud nu(gp, model.d, nu_vals, media);
    const PathView xv(grid, x), yv(grid, y);
    const double fx = model.drift(t, xv, mu.view(), omega.span());
    const double fy = model.drift(t, yv, nu.view(), omega.span());
    const double denom = sup_norm_diff(xv, yv, -grid.tau(), t) +
                         (kind == 0 ? 0.0 : bl_distance_exact(mu, nu, t, model.metric_kind).value);
    Probe pr;
    pr.ratio = denom > 1e-12 ? std::abs(fx - fy) / denom : 0.0;
    pr.max_f = std::max(std::abs(fx), std::abs(fy));
    pr.h = model.h(omega.span());
    out[p] = pr;
  });

  AuditReport r;
  r.probes = probes;
  r.declared_f_sl = model.bounds.f_sl;
  r.declared_f_sup = model.bounds.f_sup;
  r.min_h = out.front().h;
  r.max_h = out.front().h;
  for (const auto& pr : out) {
    r.max_ratio = std::max(r.max_ratio, pr.ratio);
    r.max_abs_drift = std::max(r.max_abs_drift, pr.max_f);
    r.min_h = std::min(r.min_h, pr.h);
    r.max_h = std::max(r.max_h, pr.h);
  }
  r.lipschitz_violation = r.max_ratio > 1.05 * model.bounds.f_sl + 1e-12;
  r.drift_bound_violation = r.max_abs_drift > model.bounds.f_sup * (1.0 + 1e-12) + 1e-15;
  r.diffusion_violation = r.min_h < model.bounds.h_star - 1e-12 || r.max_h > model.bounds.h_sup + 1e-12;
  return r;
}

}  // namespace mkv
