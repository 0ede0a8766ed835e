#include "mkv/mkv_solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mkv/metrics.hpp"
#include "mkv/parallel.hpp"

namespace mkv {
namespace {

constexpr std::uint64_t kFreshTag = 0x46524553480000ULL;
constexpr std::uint64_t kBootTag = 0x424F4F5400ULL;

double exact_on(const ParticleCloud& a, const ParticleCloud& b, std::span<const std::size_t> ia,
                std::span<const std::size_t> ib, double t, const MetricKind& kind) {
  return bl_distance_exact(a.select(ia), b.select(ib), t, kind).value;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

void write_trace_csv(std::ostream& out, const PicardTrace& trace) {
  out << "iter,coupling_dist,lp_dist_subsample,seconds\n";
  char buf[160];
  for (const auto& r : trace.iterates) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.iteration, r.coupling_dist, r.lp_dist_subsample,
                  r.seconds);
    out << buf;
  }
}

ParticleCloud picard_step(const ModelSpec& model, const ParticleCloud& nu_k, const NoiseBank& bank) {
  if (bank.count != nu_k.size()) throw Error(ErrorCode::SizeMismatch, "bank and cloud sizes differ");
  return simulate_decoupled(model, nu_k, bank);
}

MkvSolution solve_mkv(const ModelSpec& model, GridPtr grid, const SolverOptions& options, const RngStream& seed) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::BoundsError, "tol must be positive");
  if (options.max_iter == 0) throw Error(ErrorCode::BoundsError, "max_iter must be at least 1");
  const NoiseBank bank = NoiseBank::generate(model, options.particles, std::move(grid), seed);
  const double T = model.T;
  ParticleCloud current = simulate_reference(model, bank);
  PicardTrace trace;
  const std::size_t sub = std::min(options.lp_subsample, options.particles);
  for (std::size_t k = 1; k <= options.max_iter; ++k) {
    const auto start = std::chrono::steady_clock::now();
    ParticleCloud next = picard_step(model, current, bank);
    PicardRecord rec;
    rec.iteration = k;
    rec.coupling_dist = coupling_upper_bound(next, current, T, model.metric_kind);
    const auto idx = sample_indices(options.particles, sub, seed.with(k, Purpose::Subsample));
    rec.lp_dist_subsample = sub > 0 ? exact_on(next, current, idx, idx, T, model.metric_kind) : 0.0;
    bool done = rec.coupling_dist < options.tol;
    double residual = rec.coupling_dist;
    if (model.measure_free) {
      // The map ignores its argument, so its first image is already the fixed point.
      const ParticleCloud check = picard_step(model, next, bank);
      if (!(check == next)) throw Error(ErrorCode::Internal, "model declared measure free but depends on nu");
      done = true;
      residual = 0.0;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.iterates.push_back(rec);
    trace.final_residual = residual;
    current = std::move(next);
    if (done) {
      trace.converged = true;
      return {std::move(current), std::move(trace)};
    }
  }
  throw NotConverged({std::move(current), std::move(trace)});
}

ResidualReport fixed_point_residual(const ModelSpec& model, const ParticleCloud& cloud, const RngStream& seed,
                                    const ResidualOptions& options) {
  if (options.repeats == 0) throw Error(ErrorCode::BoundsError, "residual needs at least one repeat");
  const std::size_t m = cloud.size();
  const std::size_t sub = std::min(options.subsample, m);
  const double T = model.T;
  const ParticleCloud own = simulate_decoupled(model, cloud, NoiseBank::generate(model, m, cloud.grid_ptr(), seed));
  std::vector<double> res(options.repeats), base(options.repeats);
  for (std::size_t r = 0; r < options.repeats; ++r) {
    const RngStream fresh_seed = seed.fork(kFreshTag + r);
    const ParticleCloud fresh = simulate_decoupled(model, cloud, m, fresh_seed);
    const auto idx = sample_indices(m, sub, fresh_seed.with(r, Purpose::Subsample));
    res[r] = exact_on(cloud, fresh, idx, idx, T, model.metric_kind);
    base[r] = exact_on(own, fresh, idx, idx, T, model.metric_kind);
  }
  ResidualReport rep;
  rep.subsample = sub;
  rep.repeats = options.repeats;
  rep.residual = mean_of(res);
  rep.baseline = mean_of(base);
  rep.residual_stderr = sample_sd(res) / std::sqrt(static_cast<double>(options.repeats));
  rep.baseline_stderr = sample_sd(base) / std::sqrt(static_cast<double>(options.repeats));
  return rep;
}

double gronwall_constant(const ModelSpec& model) {
  return std::exp(model.bounds.f_sl * model.T) * model.bounds.f_sl;
}

std::vector<ContractionRow> contraction_diagnostic(const ModelSpec& model, const ParticleCloud& mu,
                                                   const ParticleCloud& nu, const std::vector<double>& checkpoints,
                                                   const RngStream& seed, std::size_t bootstrap) {
  if (mu.size() != nu.size()) throw Error(ErrorCode::SizeMismatch, "clouds must have the same size");
  require_same_grid(mu.grid(), nu.grid());
  const NoiseBank bank = NoiseBank::generate(model, mu.size(), mu.grid_ptr(), seed);
  const ParticleCloud qmu = simulate_decoupled(model, mu, bank);
  const ParticleCloud qnu = simulate_decoupled(model, nu, bank);
  const double c = gronwall_constant(model);
  const auto kind = model.metric_kind;
  const auto all = all_indices(mu.size());

  std::vector<double> times{0.0};
  times.insert(times.end(), checkpoints.begin(), checkpoints.end());
  std::vector<double> input(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) input[j] = bl_distance_exact(mu, nu, times[j], kind).value;

  std::vector<std::vector<std::size_t>> boot(bootstrap);
  for (std::size_t b = 0; b < bootstrap; ++b) {
    SplitMix64 g = seed.fork(kBootTag).with(b, Purpose::Bootstrap).engine();
    boot[b].resize(mu.size());
    for (auto& i : boot[b]) i = std::min(mu.size() - 1, static_cast<std::size_t>(uniform01(g) * mu.size()));
  }

  std::vector<ContractionRow> rows(checkpoints.size());
  parallel_for(checkpoints.size(), [&](std::size_t c_i) {
    const std::size_t j = c_i + 1;
    ContractionRow row;
    row.t = times[j];
    row.input_dist = input[j];
    row.lhs = exact_on(qmu, qnu, all, all, row.t, kind);
    double integral = 0.0;
    for (std::size_t q = 1; q <= j; ++q) integral += 0.5 * (input[q - 1] + input[q]) * (times[q] - times[q - 1]);
    row.rhs = c * integral;
    std::vector<double> lb(bootstrap);
    for (std::size_t b = 0; b < bootstrap; ++b) lb[b] = exact_on(qmu, qnu, boot[b], boot[b], row.t, kind);
    row.stderr_ = sample_sd(lb);
    row.hard_violation = row.lhs > row.rhs + 3.0 * row.stderr_ + 1e-12;
    rows[c_i] = row;
  });
  return rows;
}

std::vector<CompositionRow> composition_decay(const ModelSpec& model, const ParticleCloud& mu,
                                              const ParticleCloud& nu, std::size_t n_max, const RngStream& seed) {
  if (mu.size() != nu.size()) throw Error(ErrorCode::SizeMismatch, "clouds must have the same size");
  const NoiseBank bank = NoiseBank::generate(model, mu.size(), mu.grid_ptr(), seed);
  const double ct = gronwall_constant(model) * model.T;
  const double d0 = bl_distance_exact(mu, nu, model.T, model.metric_kind).value;
  std::vector<CompositionRow> out{{0, d0, d0}};
  ParticleCloud a = mu, b = nu;
  double factor = 1.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    a = picard_step(model, a, bank);
    b = picard_step(model, b, bank);
    factor *= ct / static_cast<double>(n);
    out.push_back({n, bl_distance_exact(a, b, model.T, model.metric_kind).value, factor * d0});
  }
  return out;
}

}  // namespace mkv
