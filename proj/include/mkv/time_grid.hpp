#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace mkv {

/// Uniform grid on [-tau, T]. Node 0 is -tau, node past_steps() is t = 0 and the
/// last node is T.
class TimeGrid {
 public:
  TimeGrid(double tau, double horizon, double dt);

  double tau() const { return tau_; }
  double horizon() const { return horizon_; }
  double dt() const { return dt_; }

  std::size_t size() const { return nodes_.size(); }
  std::size_t past_steps() const { return past_steps_; }
  std::size_t future_steps() const { return future_steps_; }
  std::size_t zero_index() const { return past_steps_; }
  std::size_t last_index() const { return nodes_.size() - 1; }

  double node(std::size_t k) const { return nodes_[k]; }
  const std::vector<double>& nodes() const { return nodes_; }

  bool same_as(const TimeGrid& other) const {
    return tau_ == other.tau_ && horizon_ == other.horizon_ && dt_ == other.dt_;
  }

 private:
  double tau_;
  double horizon_;
  double dt_;
  std::size_t past_steps_;
  std::size_t future_steps_;
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

/// Throws NonPositive when horizon <= 0, dt <= 0 or tau < 0, NonDivisibleStep
/// when tau/dt or horizon/dt is not an integer within 1e-9.
GridPtr make_time_grid(double tau, double horizon, double dt);

/// Largest node index whose time is <= t + 1e-12 (floor semantics).
std::size_t restrict_index(const TimeGrid& grid, double t);

/// Smallest node index whose time is >= t - 1e-12.
std::size_t ceil_index(const TimeGrid& grid, double t);

void require_same_grid(const TimeGrid& a, const TimeGrid& b);

}  // namespace mkv
