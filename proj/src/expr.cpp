#include "mkv/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mkv/error.hpp"

namespace mkv {

double ScalarFn::operator()(double x) const {
  switch (kind) {
    case Kind::Constant: return scale;
    case Kind::Affine: return slope * x + offset;
    case Kind::Sin: return scale * std::sin(slope * x + offset);
    case Kind::Cos: return scale * std::cos(slope * x + offset);
    case Kind::ExpDecay: return scale * std::exp(-slope * std::max(x, 0.0));
    case Kind::Clip: return std::clamp(slope * x + offset, lo, hi);
    case Kind::Gauss: {
      const double z = slope * x + offset;
      return scale * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

double ScalarFn::derivative(double x) const {
  switch (kind) {
    case Kind::Constant: return 0.0;
    case Kind::Affine: return slope;
    case Kind::Sin: return scale * slope * std::cos(slope * x + offset);
    case Kind::Cos: return -scale * slope * std::sin(slope * x + offset);
    case Kind::ExpDecay: return x > 0.0 ? -slope * scale * std::exp(-slope * x) : 0.0;
    case Kind::Clip: {
      const double z = slope * x + offset;
      return (z > lo && z < hi) ? slope : 0.0;
    }
    case Kind::Gauss: {
      const double z = slope * x + offset;
      return -scale * slope * z * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

double ScalarFn::second_derivative(double x) const {
  switch (kind) {
    case Kind::Constant:
    case Kind::Affine:
    case Kind::Clip: return 0.0;
    case Kind::Sin: return -scale * slope * slope * std::sin(slope * x + offset);
    case Kind::Cos: return -scale * slope * slope * std::cos(slope * x + offset);
    case Kind::ExpDecay: return x > 0.0 ? slope * slope * scale * std::exp(-slope * x) : 0.0;
    case Kind::Gauss: {
      const double z = slope * x + offset;
      return scale * slope * slope * (z * z - 1.0) * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

double ScalarFn::sup_abs() const {
  switch (kind) {
    case Kind::Constant: return std::abs(scale);
    case Kind::Affine: return slope == 0.0 ? std::abs(offset) : std::numeric_limits<double>::infinity();
    case Kind::Sin:
    case Kind::Cos:
    case Kind::ExpDecay:
    case Kind::Gauss: return std::abs(scale);
    case Kind::Clip: return std::max(std::abs(lo), std::abs(hi));
  }
  return 0.0;
}

double ScalarFn::lipschitz() const {
  switch (kind) {
    case Kind::Constant: return 0.0;
    case Kind::Affine:
    case Kind::Clip: return std::abs(slope);
    case Kind::Sin:
    case Kind::Cos:
    case Kind::ExpDecay: return std::abs(scale * slope);
    case Kind::Gauss: return std::abs(scale * slope) * std::exp(-0.5);
  }
  return 0.0;
}

double ScalarFn::sup_abs_second_derivative() const {
  switch (kind) {
    case Kind::Constant:
    case Kind::Affine:
    case Kind::Clip: return 0.0;
    case Kind::Sin:
    case Kind::Cos:
    case Kind::ExpDecay:
    case Kind::Gauss: return std::abs(scale) * slope * slope;
  }
  return 0.0;
}

bool ScalarFn::smooth_bounded() const {
  return kind == Kind::Constant || kind == Kind::Sin || kind == Kind::Cos || kind == Kind::Gauss;
}

const char* ScalarFn::kind_name() const {
  switch (kind) {
    case Kind::Constant: return "constant";
    case Kind::Affine: return "affine";
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::ExpDecay: return "exp_decay";
    case Kind::Clip: return "clip";
    case Kind::Gauss: return "gauss";
  }
  return "constant";
}

ScalarFn::Kind ScalarFn::parse_kind(const std::string& name) {
  if (name == "constant") return Kind::Constant;
  if (name == "affine") return Kind::Affine;
  if (name == "sin") return Kind::Sin;
  if (name == "cos") return Kind::Cos;
  if (name == "exp_decay") return Kind::ExpDecay;
  if (name == "clip") return Kind::Clip;
  if (name == "gauss") return Kind::Gauss;
  throw Error(ErrorCode::SchemaError, "unknown function kind '" + name + "'");
}

}  // namespace mkv
