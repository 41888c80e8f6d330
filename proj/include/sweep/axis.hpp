#pragma once

#include "sweep/geometry.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace sweep {

namespace bounds {
inline constexpr ParamRange control_point{-0.5, 0.5};
}  // namespace bounds

/// Clamped uniform knot vector of a quadratic B-spline with n control points:
/// three zeros, the n-3 interior knots i/(n-2), three ones.
std::vector<double> clamped_knots(std::size_t n);

/// Knot span index s with knots[s] <= t < knots[s+1], using the last
/// non-degenerate span at t = 1.
std::size_t knot_span(std::span<const double> knots, std::size_t n, double t);

/// Basis weights N_j(t), j < n, of the clamped quadratic spline.
std::vector<double> bspline_basis(std::size_t n, double t);

/// de Boor evaluation of the clamped quadratic spline. Scalar is double for
/// plain evaluation or an automatic-differentiation type for jets.
template <class Scalar>
Vec3T<Scalar> bspline_point(std::span<const Vec3T<Scalar>> ctrl, std::span<const double> knots,
                            double t) {
  constexpr std::size_t p = 2;
  const std::size_t n = ctrl.size();
  const std::size_t s = knot_span(knots, n, t);
  Vec3T<Scalar> d[p + 1];
  for (std::size_t j = 0; j <= p; ++j) d[j] = ctrl[j + s - p];
  for (std::size_t r = 1; r <= p; ++r) {
    for (std::size_t j = p; j >= r; --j) {
      const double alpha = (t - knots[j + s - p]) / (knots[j + 1 + s - r] - knots[j + s - p]);
      d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
    }
  }
  return d[p];
}

/// First derivative ds/dt, evaluated as the degree-1 hodograph spline.
template <class Scalar>
Vec3T<Scalar> bspline_derivative(std::span<const Vec3T<Scalar>> ctrl,
                                 std::span<const double> knots, double t) {
  const std::size_t n = ctrl.size();
  const std::size_t s = knot_span(knots, n, t);
  auto hodograph = [&](std::size_t i) -> Vec3T<Scalar> {
    return (2.0 / (knots[i + 3] - knots[i + 1])) * (ctrl[i + 1] - ctrl[i]);
  };
  const double beta = (t - knots[s]) / (knots[s + 1] - knots[s]);
  return (1.0 - beta) * hodograph(s - 2) + beta * hodograph(s - 1);
}

/// Sweeping axis: clamped quadratic B-spline over t in [0, 1].
class SweepAxis {
 public:
  SweepAxis();
  explicit SweepAxis(std::vector<Vec3> control_points);

  const std::vector<Vec3>& control_points() const { return ctrl_; }
  std::vector<Vec3>& mutable_control_points() { return ctrl_; }
  std::size_t size() const { return ctrl_.size(); }
  const std::vector<double>& knots() const { return knots_; }

  Vec3 point(double t) const;
  Vec3 derivative(double t) const;

 private:
  std::vector<Vec3> ctrl_;
  std::vector<double> knots_;
};

/// Curve point; t outside [0, 1] is clamped.
Vec3 axis_point(const SweepAxis& axis, double t);

/// Unit tangent. A vanishing derivative falls back to a secant over a
/// small parameter window; throws InvalidPrimitive when that is
/// degenerate too.
Vec3 axis_tangent(const SweepAxis& axis, double t);

inline double clamp_unit(double t) { return std::clamp(t, 0.0, 1.0); }

}  // namespace sweep
