#include "sweep/axis.hpp"

#include "sweep/errors.hpp"

#include <cmath>
#include <string>

namespace sweep {

std::vector<double> clamped_knots(std::size_t n) {
  if (n < 3) throw DimensionError("sweep axis needs at least 3 control points, got " + std::to_string(n));
  const std::size_t segments = n - 2;
  std::vector<double> knots(n + 3);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i <= 2) {
      knots[i] = 0.0;
    } else if (i >= n) {
      knots[i] = 1.0;
    } else {
      knots[i] = static_cast<double>(i - 2) / static_cast<double>(segments);
    }
  }
  return knots;
}

std::size_t knot_span(std::span<const double> knots, std::size_t n, double t) {
  // Valid spans are s = 2 .. n-1.
  if (t >= knots[n]) return n - 1;
  std::size_t s = 2;
  while (s + 1 < n && t >= knots[s + 1]) ++s;
  return s;
}

std::vector<double> bspline_basis(std::size_t n, double t) {
  t = clamp_unit(t);
  const std::vector<double> knots = clamped_knots(n);
  const std::size_t s = knot_span(knots, n, t);
  // Cox-de Boor triangle for the three non-zero functions N_{s-2..s}.
  double left[3], right[3], basis[3] = {1.0, 0.0, 0.0};
  for (std::size_t j = 1; j <= 2; ++j) {
    left[j] = t - knots[s + 1 - j];
    right[j] = knots[s + j] - t;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double temp = basis[r] / (right[r + 1] + left[j - r]);
      basis[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    basis[j] = saved;
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < 3; ++j) out[s - 2 + j] = basis[j];
  return out;
}

SweepAxis::SweepAxis()
    : SweepAxis({Vec3(0.0, 0.0, -0.25), Vec3(0.0, 0.0, 0.0), Vec3(0.0, 0.0, 0.25)}) {}

SweepAxis::SweepAxis(std::vector<Vec3> control_points)
    : ctrl_(std::move(control_points)), knots_(clamped_knots(ctrl_.size())) {}

Vec3 SweepAxis::point(double t) const {
  return bspline_point<double>(std::span<const Vec3>(ctrl_), knots_, clamp_unit(t));
}

Vec3 SweepAxis::derivative(double t) const {
  return bspline_derivative<double>(std::span<const Vec3>(ctrl_), knots_, clamp_unit(t));
}

Vec3 axis_point(const SweepAxis& axis, double t) { return axis.point(t); }

Vec3 axis_tangent(const SweepAxis& axis, double t) {
  t = clamp_unit(t);
  const Vec3 d = axis.derivative(t);
  const double norm = d.norm();
  if (norm > 1e-12) return d / norm;
  constexpr double window = 1e-4;
  const Vec3 secant = axis.point(std::min(1.0, t + window)) - axis.point(std::max(0.0, t - window));
  if (secant.norm() <= 1e-14) {
    throw InvalidPrimitive("degenerate sweep axis: zero tangent at t = " + std::to_string(t));
  }
  return secant.normalized();
}

}  // namespace sweep
