#include "sweep/scaling.hpp"

#include "sweep/axis.hpp"

#include <cmath>

namespace sweep {

double ScalingPoly::raw(double t) const {
  // Horner with the implicit constant term 1.
  double value = 0.0;
  for (double c : coeffs) value = value * t + c;
  return value * t + 1.0;
}

double ScalingPoly::coeff_weight(std::size_t j, double t) const {
  return std::pow(t, static_cast<double>(coeffs.size() - j));
}

double scale_guard(double raw) {
  const double z = raw - kScaleFloor;
  if (z >= kScaleBlend) return raw;
  return kScaleFloor + kScaleBlend * std::exp(z / kScaleBlend - 1.0);
}

double scale_guard_derivative(double raw) {
  const double z = raw - kScaleFloor;
  if (z >= kScaleBlend) return 1.0;
  return std::exp(z / kScaleBlend - 1.0);
}

double scaling_value(const ScalingPoly& scaling, double t) {
  return scale_guard(scaling.raw(clamp_unit(t)));
}

}  // namespace sweep
