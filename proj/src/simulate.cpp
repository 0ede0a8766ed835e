#include "mkv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "mkv/error.hpp"
#include "mkv/parallel.hpp"

namespace mkv {
namespace {

void check_bank(const ModelSpec& model, const NoiseBank& bank) {
  if (!bank.grid) throw Error(ErrorCode::Internal, "noise bank without a grid");
  require_model_grid(model, *bank.grid);
  if (bank.count == 0) throw Error(ErrorCode::NonPositive, "simulation needs at least one particle");
  if (bank.dim != model.d) throw Error(ErrorCode::DimensionMismatch, "bank media dimension differs from model");
}

// Copies the initial segment of particle i into its row.
void seed_row(const NoiseBank& bank, std::size_t i, std::span<double> row) {
  const auto init = bank.initial_of(i);
  std::copy(init.begin(), init.end(), row.begin());
}

// One left-point Euler step; shared by every integrator so that a zero drift
// reproduces the reference recursion bit for bit.
inline double euler_step(double x, double drift, double dt, double h, double db) {
  return x + drift * dt + h * db;
}

std::vector<double> media_copy(const NoiseBank& bank) { return bank.media; }

constexpr std::uint64_t kAtomTag = 0xA7035;

bool subsampling(const ModelSpec& model, std::size_t cloud_size) {
  return !model.measure_free && model.drift_atoms > 0 && model.drift_atoms < cloud_size;
}

// Atoms `idx` of `src` copied into contiguous storage, so a CloudView can point at them.
struct AtomSubset {
  std::vector<double> values;
  std::vector<double> media;

  AtomSubset(const CloudView& src, const std::vector<std::size_t>& idx) {
    const std::size_t len = src.grid->size();
    values.reserve(idx.size() * len);
    media.reserve(idx.size() * src.dim);
    for (std::size_t j : idx) {
      const auto p = src.path(j).values();
      values.insert(values.end(), p.begin(), p.end());
      const auto w = src.media_of(j);
      media.insert(media.end(), w.begin(), w.end());
    }
  }
  CloudView view(const CloudView& src) const {
    return CloudView{src.grid, values.size() / src.grid->size(), src.dim, values, media};
  }
};

std::vector<std::size_t> step_atoms(const ModelSpec& model, const NoiseBank& bank, std::size_t cloud_size,
                                    std::size_t k) {
  return sample_indices(cloud_size, model.drift_atoms, bank.seed.fork(kAtomTag).with(k, Purpose::Subsample));
}

}  // namespace

NoiseBank NoiseBank::generate(const ModelSpec& model, std::size_t count, GridPtr grid, const RngStream& seed) {
  if (!grid) throw Error(ErrorCode::Internal, "null grid");
  require_model_grid(model, *grid);
  if (count == 0) throw Error(ErrorCode::NonPositive, "noise bank needs at least one particle");
  NoiseBank bank;
  bank.grid = grid;
  bank.count = count;
  bank.dim = model.d;
  bank.seed = seed;
  const std::size_t past = grid->past_steps() + 1;
  const std::size_t future = grid->future_steps();
  bank.initial.resize(count * past);
  bank.media.resize(count * model.d);
  bank.increments.resize(count * future);
  const double sd = std::sqrt(grid->dt());
  parallel_for(count, [&](std::size_t i) {
    const auto init = sample_initial(model, *grid, seed.with(i, Purpose::Initial));
    std::copy(init.begin(), init.end(), bank.initial.begin() + static_cast<std::ptrdiff_t>(i * past));
    const MediaSample w = sample_media(model, seed.with(i, Purpose::Media));
    if (w.dim() != model.d) throw Error(ErrorCode::DimensionMismatch, "media sample dimension differs from model");
    std::copy(w.coords.begin(), w.coords.end(), bank.media.begin() + static_cast<std::ptrdiff_t>(i * model.d));
    SplitMix64 g = seed.with(i, Purpose::Brownian).engine();
    std::normal_distribution<double> normal(0.0, 1.0);
    double* inc = bank.increments.data() + i * future;
    for (std::size_t k = 0; k < future; ++k) inc[k] = sd * normal(g);
  }, 16);
  return bank;
}

std::span<const double> NoiseBank::initial_of(std::size_t i) const {
  const std::size_t past = grid->past_steps() + 1;
  return std::span<const double>(initial).subspan(i * past, past);
}

std::span<const double> NoiseBank::media_of(std::size_t i) const {
  return std::span<const double>(media).subspan(i * dim, dim);
}

std::span<const double> NoiseBank::increments_of(std::size_t i) const {
  const std::size_t future = grid->future_steps();
  return std::span<const double>(increments).subspan(i * future, future);
}

ParticleCloud simulate_coupled(const ModelSpec& model, const NoiseBank& bank) {
  check_bank(model, bank);
  const TimeGrid& grid = *bank.grid;
  const std::size_t n = bank.count;
  const std::size_t len = grid.size();
  std::vector<double> values(n * len, 0.0);
  for (std::size_t i = 0; i < n; ++i) seed_row(bank, i, std::span<double>(values).subspan(i * len, len));
  const CloudView view{&grid, n, bank.dim, values, bank.media};
  std::vector<double> drift(n);
  const std::size_t k0 = grid.zero_index();
  for (std::size_t k = k0; k < grid.last_index(); ++k) {
    const double t = grid.node(k);
    std::optional<AtomSubset> subset;
    if (subsampling(model, n)) subset.emplace(view, step_atoms(model, bank, n, k));
    const CloudView measure = subset ? subset->view(view) : view;
    // Phase one reads a frozen snapshot, phase two writes node k + 1.
    parallel_for(n, [&](std::size_t i) { drift[i] = eval_drift(model, t, view.path(i), measure, bank.media_of(i)); }, 8);
    for (std::size_t i = 0; i < n; ++i) {
      double* row = values.data() + i * len;
      row[k + 1] = euler_step(row[k], drift[i], grid.dt(), model.h(bank.media_of(i)), bank.increments_of(i)[k - k0]);
    }
  }
  return ParticleCloud(bank.grid, bank.dim, std::move(values), media_copy(bank));
}

ParticleCloud simulate_coupled(const ModelSpec& model, std::size_t n, GridPtr grid, const RngStream& seed) {
  return simulate_coupled(model, NoiseBank::generate(model, n, std::move(grid), seed));
}

ParticleCloud simulate_decoupled(const ModelSpec& model, const ParticleCloud& nu, const NoiseBank& bank) {
  check_bank(model, bank);
  require_same_grid(nu.grid(), *bank.grid);
  if (nu.dim() != bank.dim) throw Error(ErrorCode::DimensionMismatch, "frozen cloud media dimension differs");
  const TimeGrid& grid = *bank.grid;
  const std::size_t len = grid.size();
  const std::size_t k0 = grid.zero_index();
  std::vector<double> values(bank.count * len, 0.0);
  const CloudView frozen = nu.view();
  // With atom subsampling every particle sees the same subset at a given step.
  std::vector<AtomSubset> subsets;
  std::vector<CloudView> measures(grid.size(), frozen);
  if (subsampling(model, nu.size())) {
    subsets.reserve(grid.size());
    for (std::size_t k = k0; k < grid.last_index(); ++k) {
      subsets.emplace_back(frozen, step_atoms(model, bank, nu.size(), k));
      measures[k] = subsets.back().view(frozen);
    }
  }
  parallel_for(bank.count, [&](std::size_t i) {
    std::span<double> row = std::span<double>(values).subspan(i * len, len);
    seed_row(bank, i, row);
    const auto w = bank.media_of(i);
    const auto inc = bank.increments_of(i);
    const double h = model.h(w);
    const PathView x(grid, row);
    for (std::size_t k = k0; k < grid.last_index(); ++k) {
      const double f = eval_drift(model, grid.node(k), x, measures[k], w);
      row[k + 1] = euler_step(row[k], f, grid.dt(), h, inc[k - k0]);
    }
  }, 4);
  return ParticleCloud(bank.grid, bank.dim, std::move(values), media_copy(bank));
}

ParticleCloud simulate_decoupled(const ModelSpec& model, const ParticleCloud& nu, std::size_t m,
                                 const RngStream& seed) {
  return simulate_decoupled(model, nu, NoiseBank::generate(model, m, nu.grid_ptr(), seed));
}

ParticleCloud simulate_reference(const ModelSpec& model, const NoiseBank& bank) {
  check_bank(model, bank);
  const TimeGrid& grid = *bank.grid;
  const std::size_t len = grid.size();
  const std::size_t k0 = grid.zero_index();
  std::vector<double> values(bank.count * len, 0.0);
  parallel_for(bank.count, [&](std::size_t i) {
    std::span<double> row = std::span<double>(values).subspan(i * len, len);
    seed_row(bank, i, row);
    const double h = model.h(bank.media_of(i));
    const auto inc = bank.increments_of(i);
    for (std::size_t k = k0; k < grid.last_index(); ++k) row[k + 1] = euler_step(row[k], 0.0, grid.dt(), h, inc[k - k0]);
  }, 16);
  return ParticleCloud(bank.grid, bank.dim, std::move(values), media_copy(bank));
}

ParticleCloud simulate_reference(const ModelSpec& model, std::size_t m, GridPtr grid, const RngStream& seed) {
  return simulate_reference(model, NoiseBank::generate(model, m, std::move(grid), seed));
}

}  // namespace mkv
