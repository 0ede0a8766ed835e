#include "mkv/time_grid.hpp"

#include <cmath>
#include <string>

#include "mkv/error.hpp"

namespace mkv {
namespace {

constexpr double kTimeSlack = 1e-12;

std::size_t integral_ratio(double num, double dt, const char* what) {
  const double ratio = num / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9) {
    throw Error(ErrorCode::NonDivisibleStep,
                std::string(what) + " is not an integer multiple of dt");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

TimeGrid::TimeGrid(double tau, double horizon, double dt) : tau_(tau), horizon_(horizon), dt_(dt) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::NonPositive, "time horizon T must be > 0");
  if (!(dt > 0.0)) throw Error(ErrorCode::NonPositive, "dt must be > 0");
  if (!(tau >= 0.0)) throw Error(ErrorCode::NonPositive, "tau must be >= 0");
  past_steps_ = integral_ratio(tau, dt, "tau");
  future_steps_ = integral_ratio(horizon, dt, "T");
  if (future_steps_ == 0) throw Error(ErrorCode::NonPositive, "T/dt must be >= 1");

  const std::size_t n = past_steps_ + future_steps_ + 1;
  nodes_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    nodes_[k] = (static_cast<double>(k) - static_cast<double>(past_steps_)) * dt;
  }
  nodes_.front() = -tau;
  nodes_[past_steps_] = 0.0;
  nodes_.back() = horizon;
}

GridPtr make_time_grid(double tau, double horizon, double dt) {
  return std::make_shared<const TimeGrid>(tau, horizon, dt);
}

std::size_t restrict_index(const TimeGrid& grid, double t) {
  if (!(t >= -grid.tau() - kTimeSlack && t <= grid.horizon() + kTimeSlack)) {
    throw Error(ErrorCode::OutOfRange, "time " + std::to_string(t) + " outside [-tau, T]");
  }
  const double raw = std::floor((t + grid.tau()) / grid.dt());
  std::size_t k = raw <= 0.0 ? 0 : static_cast<std::size_t>(raw);
  if (k > grid.last_index()) k = grid.last_index();
  while (k + 1 <= grid.last_index() && grid.node(k + 1) <= t + kTimeSlack) ++k;
  while (k > 0 && grid.node(k) > t + kTimeSlack) --k;
  return k;
}

std::size_t ceil_index(const TimeGrid& grid, double t) {
  std::size_t k = restrict_index(grid, t);
  if (grid.node(k) < t - kTimeSlack && k < grid.last_index()) ++k;
  return k;
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (!a.same_as(b)) throw Error(ErrorCode::GridMismatch, "objects live on different time grids");
}

}  // namespace mkv
