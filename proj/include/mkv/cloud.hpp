#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mkv/rng.hpp"
#include "mkv/time_grid.hpp"

namespace mkv {

/// Read-only window onto one path's node values.
class PathView {
 public:
  PathView(const TimeGrid& grid, std::span<const double> values) : grid_(&grid), values_(values) {}

  const TimeGrid& grid() const { return *grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Linear interpolation between the two nodes around t. At a grid node t it
  /// reads only that node, so drifts evaluated on the grid are predictable.
  double value_at(double t) const;

 private:
  const TimeGrid* grid_;
  std::span<const double> values_;
};

/// One trajectory on the grid.
class SamplePath {
 public:
  SamplePath(GridPtr grid, std::vector<double> values);

  const TimeGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  PathView view() const { return PathView(*grid_, values_); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// One media vector in R^d, d >= 1.
struct MediaSample {
  std::vector<double> coords;

  explicit MediaSample(std::vector<double> c);
  std::size_t dim() const { return coords.size(); }
  std::span<const double> span() const { return coords; }
};

/// Non-owning view of N (path, media) atoms sharing a grid. Used for clouds
/// that are still being filled, e.g. during coupled simulation.
struct CloudView {
  const TimeGrid* grid = nullptr;
  std::size_t count = 0;
  std::size_t dim = 0;
  std::span<const double> values;  // count * grid->size(), row-major by particle
  std::span<const double> media;   // count * dim

  std::size_t size() const { return count; }
  PathView path(std::size_t i) const {
    return PathView(*grid, values.subspan(i * grid->size(), grid->size()));
  }
  std::span<const double> media_of(std::size_t i) const { return media.subspan(i * dim, dim); }
};

/// The empirical measure of N (path, media) pairs. Immutable after construction.
class ParticleCloud {
 public:
  ParticleCloud(GridPtr grid, std::size_t dim, std::vector<double> values, std::vector<double> media);

  static ParticleCloud from_particles(GridPtr grid, const std::vector<SamplePath>& paths,
                                      const std::vector<MediaSample>& media);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }
  const TimeGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  PathView path(std::size_t i) const {
    return PathView(*grid_, std::span<const double>(values_).subspan(i * grid_->size(), grid_->size()));
  }
  std::span<const double> media(std::size_t i) const {
    return std::span<const double>(media_).subspan(i * dim_, dim_);
  }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& media_data() const { return media_; }

  CloudView view() const { return CloudView{grid_.get(), count_, dim_, values_, media_}; }

  /// Atoms at the given indices (repeats allowed).
  ParticleCloud select(std::span<const std::size_t> indices) const;

  bool operator==(const ParticleCloud& other) const {
    return grid_->same_as(*other.grid_) && dim_ == other.dim_ && values_ == other.values_ &&
           media_ == other.media_;
  }

 private:
  GridPtr grid_;
  std::size_t count_;
  std::size_t dim_;
  std::vector<double> values_;
  std::vector<double> media_;
};

/// Uniform subsample without replacement; returns the whole cloud when k >= size.
ParticleCloud subsample(const ParticleCloud& cloud, std::size_t k, const RngStream& stream);

/// Sorted indices of a uniform k-subset of {0..n-1}.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, const RngStream& stream);

/// max over nodes in [a, b] of |x - y|.
double sup_norm_diff(const PathView& x, const PathView& y, double a, double b);
double sup_norm_diff(const SamplePath& x, const SamplePath& y, double a, double b);

}  // namespace mkv
