#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mkv/cloud.hpp"
#include "mkv/models.hpp"
#include "mkv/rng.hpp"

namespace mkv {

/// Initial segments, media and Brownian increments for `count` particles.
/// Particle i draws from (seed, i, Initial/Media/Brownian), so a bank is
/// reproducible and its first k particles do not depend on count.
struct NoiseBank {
  GridPtr grid;
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> initial;     // count * (past_steps + 1)
  std::vector<double> media;       // count * dim
  std::vector<double> increments;  // count * future_steps, each N(0, dt)
  RngStream seed;                   // also keys the per-step atom subsets

  static NoiseBank generate(const ModelSpec& model, std::size_t count, GridPtr grid, const RngStream& seed);

  std::span<const double> initial_of(std::size_t i) const;
  std::span<const double> media_of(std::size_t i) const;
  std::span<const double> increments_of(std::size_t i) const;
};

/// The N-particle system driven by its own empirical measure. At step k every
/// particle reads the cloud of all N paths revealed up to t_k.
ParticleCloud simulate_coupled(const ModelSpec& model, const NoiseBank& bank);
ParticleCloud simulate_coupled(const ModelSpec& model, std::size_t n, GridPtr grid, const RngStream& seed);

/// Independent particles driven by the frozen cloud nu.
ParticleCloud simulate_decoupled(const ModelSpec& model, const ParticleCloud& nu, const NoiseBank& bank);
ParticleCloud simulate_decoupled(const ModelSpec& model, const ParticleCloud& nu, std::size_t m,
                                 const RngStream& seed);

/// Driftless paths xi_0(0) + h(omega) B(t) after the initial segment.
ParticleCloud simulate_reference(const ModelSpec& model, const NoiseBank& bank);
ParticleCloud simulate_reference(const ModelSpec& model, std::size_t m, GridPtr grid, const RngStream& seed);

}  // namespace mkv
