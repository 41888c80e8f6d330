#pragma once

#include "sweep/axis.hpp"
#include "sweep/errors.hpp"
#include "sweep/primitive.hpp"

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

namespace sweep {

inline double value_of(double x) { return x; }
template <class Scalar>
double value_of(const Scalar& x) {
  return x.value();
}

template <class Scalar>
struct FrameT {
  Vec3T<Scalar> origin, tangent, normal, binormal;
};

/// World basis vector least aligned with `tangent` (first index wins ties),
/// made orthogonal to it.
template <class Scalar>
Vec3T<Scalar> seed_normal(const Vec3T<Scalar>& tangent) {
  using std::sqrt;
  int best = 0;
  double best_dot = 2.0;
  for (int i = 0; i < 3; ++i) {
    const double c = std::abs(value_of(tangent[i]));
    if (c < best_dot) {
      best_dot = c;
      best = i;
    }
  }
  Vec3T<Scalar> e = Vec3T<Scalar>::Zero();
  e[best] = Scalar(1.0);
  Vec3T<Scalar> n = e - tangent.dot(e) * tangent;
  return n / sqrt(n.dot(n));
}

/// Unit tangent with the secant fallback of axis_tangent.
template <class Scalar>
Vec3T<Scalar> spline_tangent(std::span<const Vec3T<Scalar>> ctrl, std::span<const double> knots,
                             double t) {
  using std::sqrt;
  const Vec3T<Scalar> d = bspline_derivative<Scalar>(ctrl, knots, t);
  const Scalar len2 = d.dot(d);
  if (std::sqrt(value_of(len2)) > 1e-12) return d / sqrt(len2);
  constexpr double window = 1e-4;
  const Vec3T<Scalar> secant = bspline_point<Scalar>(ctrl, knots, std::min(1.0, t + window)) -
                               bspline_point<Scalar>(ctrl, knots, std::max(0.0, t - window));
  const Scalar s2 = secant.dot(secant);
  if (std::sqrt(value_of(s2)) <= 1e-14) {
    throw InvalidPrimitive("degenerate sweep axis: zero tangent at t = " + std::to_string(t));
  }
  return secant / sqrt(s2);
}

/// Minimal rotation taking unit vector `from` to unit vector `to`, applied
/// to `v`. Antiparallel tangents turn by pi about `v` itself (v is the
/// transported normal, orthogonal to both).
template <class Scalar>
Vec3T<Scalar> minimal_rotate(const Vec3T<Scalar>& from, const Vec3T<Scalar>& to, const Vec3T<Scalar>& v) {
  const Scalar c = from.dot(to);
  if (value_of(c) < -1.0 + 1e-12) return v;
  const Vec3T<Scalar> axis = from.cross(to);
  return v * c + axis.cross(v) + axis * (axis.dot(v) / (1.0 + c));
}

/// Consecutive unit tangents closer than this are the same direction up to
/// rounding; the frame is carried over unchanged so straight axes give
/// bitwise constant frames.
inline constexpr double kSameTangent = 1e-14;

/// Frames at t_i = i / (m - 1), transported from the seed frame at t = 0.
/// The double instantiation applies kSameTangent.
template <class Scalar>
std::vector<FrameT<Scalar>> transport_frames(std::span<const Vec3T<Scalar>> ctrl,
                                             std::span<const double> knots, int m) {
  using std::sqrt;
  if (m < 2) throw DomainError("parallel transport needs at least 2 frames, got " + std::to_string(m));
  std::vector<FrameT<Scalar>> frames(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(m - 1);
    FrameT<Scalar>& f = frames[i];
    f.origin = bspline_point<Scalar>(ctrl, knots, t);
    f.tangent = spline_tangent<Scalar>(ctrl, knots, t);
    if (i == 0) {
      f.normal = seed_normal<Scalar>(f.tangent);
    } else {
      const FrameT<Scalar>& prev = frames[i - 1];
      if constexpr (std::is_same_v<Scalar, double>) {
        if ((f.tangent - prev.tangent).norm() <= kSameTangent) {
          f.tangent = prev.tangent;
          f.normal = prev.normal;
          f.binormal = prev.binormal;
          continue;
        }
      }
      Vec3T<Scalar> nrm = minimal_rotate<Scalar>(prev.tangent, f.tangent, prev.normal);
      nrm = nrm - nrm.dot(f.tangent) * f.tangent;
      f.normal = nrm / sqrt(nrm.dot(nrm));
    }
    f.binormal = f.tangent.cross(f.normal);
  }
  return frames;
}

/// Frames of the axis at t_i = i / (m - 1).
std::vector<Frame> parallel_transport_frames(const SweepAxis& axis, int m);

/// Frame at an arbitrary t, transported over a fine uniform grid from t = 0.
Frame frame_at(const SweepAxis& axis, double t);

/// Contour at uniform theta_j = 2 pi j / num_points, scaled by f(t), placed
/// as origin + x normal + y binormal.
std::vector<Vec3> profile_slice(const SweepPrimitive& primitive, const Frame& frame, double t, int num_points);
std::vector<Vec3> profile_slice(const SweepPrimitive& primitive, double t, int num_points);

}  // namespace sweep
