#pragma once

#include "sweep/geometry.hpp"

namespace sweep {

/// Superellipse |x/a|^d + |y/b|^d = 1 in the profile plane.
struct SuperellipseProfile {
  double a = 0.1;  ///< semi-axis along the frame normal
  double b = 0.1;  ///< semi-axis along the frame binormal
  double d = 2.0;  ///< curvature degree; 2 is an ellipse, large d tends to a rectangle
};

namespace bounds {
inline constexpr ParamRange semi_axis{0.01, 0.5};
inline constexpr ParamRange degree{0.3, 5.0};
}  // namespace bounds

/// Parametric contour point at polar angle theta.
Vec2 profile_point(const SuperellipseProfile& profile, double theta);

/// g(x, y) = |x/a|^d + |y/b|^d; below 1 inside, 1 on the contour.
double profile_implicit(const SuperellipseProfile& profile, const Vec2& p);

}  // namespace sweep
