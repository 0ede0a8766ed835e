#include "mkv/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mkv/error.hpp"

namespace mkv {

double PathView::value_at(double t) const {
  const std::size_t k = restrict_index(*grid_, t);
  const double t0 = grid_->node(k);
  if (k == grid_->last_index() || t <= t0) return values_[k];
  const double w = (t - t0) / grid_->dt();
  if (w <= 0.0) return values_[k];
  return (1.0 - w) * values_[k] + w * values_[k + 1];
}

SamplePath::SamplePath(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw Error(ErrorCode::GridMismatch, "path length differs from grid size");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::OutOfRange, "path value is not finite");
  }
}

MediaSample::MediaSample(std::vector<double> c) : coords(std::move(c)) {
  if (coords.empty()) throw Error(ErrorCode::DimensionMismatch, "media dimension must be >= 1");
  for (double v : coords) {
    if (!std::isfinite(v)) throw Error(ErrorCode::OutOfRange, "media coordinate is not finite");
  }
}

ParticleCloud::ParticleCloud(GridPtr grid, std::size_t dim, std::vector<double> values,
                             std::vector<double> media)
    : grid_(std::move(grid)), count_(0), dim_(dim), values_(std::move(values)), media_(std::move(media)) {
  if (!grid_) throw Error(ErrorCode::Internal, "cloud without grid");
  if (dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "media dimension must be >= 1");
  if (values_.empty() || values_.size() % grid_->size() != 0) {
    throw Error(ErrorCode::SizeMismatch, "cloud values do not tile the grid");
  }
  count_ = values_.size() / grid_->size();
  if (media_.size() != count_ * dim_) {
    throw Error(ErrorCode::DimensionMismatch, "media block does not match particle count");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::OutOfRange, "cloud path value is not finite");
  }
  for (double v : media_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::OutOfRange, "cloud media value is not finite");
  }
}

ParticleCloud ParticleCloud::from_particles(GridPtr grid, const std::vector<SamplePath>& paths,
                                            const std::vector<MediaSample>& media) {
  if (paths.empty() || paths.size() != media.size()) {
    throw Error(ErrorCode::SizeMismatch, "paths and media must be nonempty and of equal count");
  }
  const std::size_t dim = media.front().dim();
  std::vector<double> values;
  std::vector<double> med;
  values.reserve(paths.size() * grid->size());
  med.reserve(paths.size() * dim);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    require_same_grid(*grid, paths[i].grid());
    if (media[i].dim() != dim) throw Error(ErrorCode::DimensionMismatch, "media dimensions differ");
    values.insert(values.end(), paths[i].values().begin(), paths[i].values().end());
    med.insert(med.end(), media[i].coords.begin(), media[i].coords.end());
  }
  return ParticleCloud(std::move(grid), dim, std::move(values), std::move(med));
}

ParticleCloud ParticleCloud::select(std::span<const std::size_t> indices) const {
  const std::size_t n = grid_->size();
  std::vector<double> values;
  std::vector<double> med;
  values.reserve(indices.size() * n);
  med.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= count_) throw Error(ErrorCode::OutOfRange, "particle index out of range");
    auto p = path(i).values();
    values.insert(values.end(), p.begin(), p.end());
    auto m = media(i);
    med.insert(med.end(), m.begin(), m.end());
  }
  return ParticleCloud(grid_, dim_, std::move(values), std::move(med));
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, const RngStream& stream) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k >= n) return idx;
  // Partial Fisher-Yates.
  SplitMix64 g = stream.engine();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform01(g) * static_cast<double>(n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

ParticleCloud subsample(const ParticleCloud& cloud, std::size_t k, const RngStream& stream) {
  if (k >= cloud.size()) return cloud;
  const auto idx = sample_indices(cloud.size(), k, stream);
  return cloud.select(idx);
}

double sup_norm_diff(const PathView& x, const PathView& y, double a, double b) {
  require_same_grid(x.grid(), y.grid());
  if (a > b) throw Error(ErrorCode::OutOfRange, "window start after window end");
  const std::size_t lo = ceil_index(x.grid(), a);
  const std::size_t hi = restrict_index(x.grid(), b);
  double m = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) m = std::max(m, std::abs(x[k] - y[k]));
  return m;
}

double sup_norm_diff(const SamplePath& x, const SamplePath& y, double a, double b) {
  return sup_norm_diff(x.view(), y.view(), a, b);
}

}  // namespace mkv
