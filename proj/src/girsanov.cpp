#include "mkv/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mkv/error.hpp"
#include "mkv/parallel.hpp"
#include "mkv/simulate.hpp"

namespace mkv {
namespace {

constexpr std::size_t kMinSamples = 100;

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(v.size());
  return {mean, n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0};
}

std::size_t steps_until(const TimeGrid& grid, double s) {
  if (!(s >= -1e-12 && s <= grid.horizon() + 1e-12)) throw Error(ErrorCode::OutOfRange, "time outside [0, T]");
  return restrict_index(grid, s) - grid.zero_index();
}

void require_samples(std::size_t m) {
  if (m < kMinSamples) throw Error(ErrorCode::BoundsError, "Monte Carlo checks need at least 100 samples");
}

}  // namespace

std::vector<GirsanovSums> girsanov_partial_sums(const ModelSpec& model, const CloudView& nu, const PathView& y,
                                                std::span<const double> omega, std::size_t steps) {
  const TimeGrid& grid = y.grid();
  require_same_grid(grid, *nu.grid);
  if (steps > grid.future_steps()) throw Error(ErrorCode::OutOfRange, "more steps than the grid holds");
  const double h = model.h(omega);
  const double inv_h2 = 1.0 / (h * h);
  std::vector<GirsanovSums> out(steps + 1);
  double ito = 0.0;
  double quad = 0.0;
  const std::size_t k0 = grid.zero_index();
  for (std::size_t j = 0; j < steps; ++j) {
    const std::size_t k = k0 + j;
    const double f = eval_drift(model, grid.node(k), y, nu, omega);
    ito += f * (y[k + 1] - y[k]);
    quad += f * f * grid.dt();
    out[j + 1] = {ito * inv_h2, quad * inv_h2};
  }
  return out;
}

GirsanovSums girsanov_sums(const ModelSpec& model, const CloudView& nu, const PathView& y,
                           std::span<const double> omega, double s) {
  return girsanov_partial_sums(model, nu, y, omega, steps_until(y.grid(), s)).back();
}

double girsanov_functional(const ModelSpec& model, const ParticleCloud& nu, const SamplePath& y,
                           const MediaSample& omega, const TimeGrid& grid) {
  require_same_grid(grid, y.grid());
  require_same_grid(grid, nu.grid());
  return girsanov_sums(model, nu.view(), y.view(), omega.span(), grid.horizon()).functional();
}

double girsanov_functional(const ModelSpec& model, const CloudView& nu, const ParticleCloud& paths, std::size_t i) {
  return girsanov_sums(model, nu, paths.path(i), paths.media(i), paths.grid().horizon()).functional();
}

double log_exp_martingale(const ModelSpec& model, const ParticleCloud& nu, double alpha, const SamplePath& y,
                          const MediaSample& omega, double s) {
  return girsanov_sums(model, nu.view(), y.view(), omega.span(), s).log_martingale(alpha);
}

double exp_martingale_value(const ModelSpec& model, const ParticleCloud& nu, double alpha, const SamplePath& y,
                            const MediaSample& omega, double s) {
  return std::exp(log_exp_martingale(model, nu, alpha, y, omega, s));
}

double moment_bound(const ModelSpec& model, double alpha) {
  const double fs = model.bounds.f_sup;
  const double hs = model.bounds.h_star;
  return std::exp(std::abs(alpha * alpha - alpha) * model.T * fs * fs / (2.0 * hs * hs));
}

std::vector<GirsanovStats> mc_martingale_sweep(const ModelSpec& model, const ParticleCloud& nu,
                                               const std::vector<double>& alphas,
                                               const std::vector<double>& times, std::size_t m,
                                               const RngStream& seed) {
  require_samples(m);
  const ParticleCloud ref = simulate_reference(model, m, nu.grid_ptr(), seed);
  const TimeGrid& grid = ref.grid();
  std::vector<std::size_t> steps;
  for (double s : times) steps.push_back(steps_until(grid, s));
  const std::size_t max_steps = steps.empty() ? 0 : *std::max_element(steps.begin(), steps.end());
  // sums[i][c] for sample i and checkpoint c.
  std::vector<std::vector<GirsanovSums>> sums(m);
  const CloudView frozen = nu.view();
  parallel_for(m, [&](std::size_t i) {
    const auto partial = girsanov_partial_sums(model, frozen, ref.path(i), ref.media(i), max_steps);
    sums[i].resize(steps.size());
    for (std::size_t c = 0; c < steps.size(); ++c) sums[i][c] = partial[steps[c]];
  }, 8);
  std::vector<GirsanovStats> out;
  std::vector<double> values(m);
  for (double alpha : alphas) {
    for (std::size_t c = 0; c < steps.size(); ++c) {
      GirsanovStats st;
      st.alpha = alpha;
      st.time = times[c];
      st.samples = m;
      st.bound = 1.0;
      if (alpha == 0.0) {
        st.mc_mean = 1.0;
        st.mc_stderr = 0.0;
      } else {
        for (std::size_t i = 0; i < m; ++i) values[i] = std::exp(sums[i][c].log_martingale(alpha));
        const auto ms = mean_stderr(values);
        st.mc_mean = ms.mean;
        st.mc_stderr = ms.stderr_;
      }
      st.pass = std::abs(st.mc_mean - 1.0) <= 3.0 * st.mc_stderr + 1e-12;
      out.push_back(st);
    }
  }
  return out;
}

GirsanovStats mc_martingale_mean(const ModelSpec& model, const ParticleCloud& nu, double alpha, std::size_t m,
                                 const RngStream& seed) {
  return mc_martingale_sweep(model, nu, {alpha}, {model.T}, m, seed).front();
}

std::vector<GirsanovStats> moment_bound_sweep(const ModelSpec& model, const ParticleCloud& nu,
                                              const std::vector<double>& alphas, std::size_t m,
                                              const RngStream& seed) {
  require_samples(m);
  const ParticleCloud ref = simulate_reference(model, m, nu.grid_ptr(), seed);
  std::vector<double> d(m);
  const CloudView frozen = nu.view();
  parallel_for(m, [&](std::size_t i) { d[i] = girsanov_functional(model, frozen, ref, i); }, 8);
  std::vector<GirsanovStats> out;
  std::vector<double> values(m);
  for (double alpha : alphas) {
    GirsanovStats st;
    st.alpha = alpha;
    st.time = model.T;
    st.samples = m;
    st.bound = moment_bound(model, alpha);
    if (alpha == 0.0) {
      st.mc_mean = 1.0;
    } else {
      for (std::size_t i = 0; i < m; ++i) values[i] = std::exp(alpha * d[i]);
      const auto ms = mean_stderr(values);
      st.mc_mean = ms.mean;
      st.mc_stderr = ms.stderr_;
    }
    const double rel = st.mc_mean > 0.0 ? st.mc_stderr / st.mc_mean : 0.0;
    st.pass = st.mc_mean <= st.bound * (1.0 + 3.0 * rel) + 1e-12;
    out.push_back(st);
  }
  return out;
}

GirsanovStats moment_bound_check(const ModelSpec& model, const ParticleCloud& nu, double alpha, std::size_t m,
                                 const RngStream& seed) {
  return moment_bound_sweep(model, nu, {alpha}, m, seed).front();
}

double log_rn_coupled(const ModelSpec& model, const ParticleCloud& cloud) {
  std::vector<double> d(cloud.size());
  const CloudView self = cloud.view();
  parallel_for(cloud.size(), [&](std::size_t i) { d[i] = girsanov_functional(model, self, cloud, i); }, 8);
  double total = 0.0;
  for (double v : d) total += v;
  return total;
}

void write_stats_csv(std::ostream& out, const std::vector<GirsanovStats>& rows) {
  out << "alpha,time,mc_mean,mc_stderr,bound,samples,pass_flag\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%d\n", r.alpha, r.time, r.mc_mean,
                  r.mc_stderr, r.bound, r.samples, r.pass ? 1 : 0);
    out << buf;
  }
}

}  // namespace mkv
