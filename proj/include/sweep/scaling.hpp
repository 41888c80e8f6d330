#pragma once

#include "sweep/geometry.hpp"

#include <vector>

namespace sweep {

namespace bounds {
inline constexpr ParamRange scaling_coeff{-0.5, 0.5};
}  // namespace bounds

/// Scale floor and blend width of the positivity guard.
inline constexpr double kScaleFloor = 0.05;
inline constexpr double kScaleBlend = 0.01;

/// p(t) = f1 t^k + ... + fk t + 1, coefficients highest degree first.
struct ScalingPoly {
  std::vector<double> coeffs = {0.0, 0.0};

  int degree() const { return static_cast<int>(coeffs.size()); }
  double raw(double t) const;
  /// d p / d f_j = t^(k - j) for zero-based j.
  double coeff_weight(std::size_t j, double t) const;
};

/// Positivity guard: identity for raw >= floor + blend, exponential
/// approach to the floor below; C1 everywhere and always > floor.
double scale_guard(double raw);
double scale_guard_derivative(double raw);

/// Profile scale f(t) > 0 at t in [0, 1].
double scaling_value(const ScalingPoly& scaling, double t);

}  // namespace sweep
