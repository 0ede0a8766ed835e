#pragma once

#include <string>

namespace mkv {

/// Small declarative scalar function family used to configure interaction
/// forms, kernels and test functions:
///   constant  scale
///   affine    slope*x + offset
///   sin       scale*sin(slope*x + offset)
///   cos       scale*cos(slope*x + offset)
///   exp_decay scale*exp(-slope*max(x, 0))
///   clip      clamp(slope*x + offset, lo, hi)
///   gauss     scale*exp(-(slope*x + offset)^2 / 2)
struct ScalarFn {
  enum class Kind { Constant, Affine, Sin, Cos, ExpDecay, Clip, Gauss };

  Kind kind = Kind::Constant;
  double slope = 1.0;
  double offset = 0.0;
  double scale = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  static ScalarFn constant(double c) { return {Kind::Constant, 0.0, 0.0, c, 0.0, 0.0}; }
  static ScalarFn affine(double a, double b) { return {Kind::Affine, a, b, 1.0, 0.0, 0.0}; }
  static ScalarFn sine(double scale = 1.0, double freq = 1.0, double phase = 0.0) {
    return {Kind::Sin, freq, phase, scale, 0.0, 0.0};
  }
  static ScalarFn cosine(double scale = 1.0, double freq = 1.0, double phase = 0.0) {
    return {Kind::Cos, freq, phase, scale, 0.0, 0.0};
  }
  static ScalarFn exp_decay(double scale = 1.0, double rate = 1.0) {
    return {Kind::ExpDecay, rate, 0.0, scale, 0.0, 0.0};
  }
  static ScalarFn clip(double lo = 0.0, double hi = 1.0, double slope = 1.0, double offset = 0.0) {
    return {Kind::Clip, slope, offset, 1.0, lo, hi};
  }
  static ScalarFn gauss(double scale = 1.0, double slope = 1.0, double offset = 0.0) {
    return {Kind::Gauss, slope, offset, scale, 0.0, 0.0};
  }

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// sup |f| over the real line (infinite for a non-flat affine map).
  double sup_abs() const;
  double lipschitz() const;
  double sup_abs_derivative() const { return lipschitz(); }
  double sup_abs_second_derivative() const;
  /// True when f is C^2 with bounded derivatives (clip and affine are not used as PDE test functions).
  bool smooth_bounded() const;

  const char* kind_name() const;
  static Kind parse_kind(const std::string& name);
  bool operator==(const ScalarFn&) const = default;
};

}  // namespace mkv
