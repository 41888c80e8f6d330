#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace sweep {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

template <class Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;

using PointList = std::vector<Vec3>;

/// Orthonormal moving frame. The profile plane is spanned by (normal,
/// binormal) and binormal = tangent x normal.
struct Frame {
  Vec3 origin = Vec3::Zero();
  Vec3 tangent = Vec3::UnitZ();
  Vec3 normal = Vec3::UnitX();
  Vec3 binormal = Vec3::UnitY();

  /// Local coordinates (along normal, along binormal, along tangent).
  Vec3 to_local(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(normal), d.dot(binormal), d.dot(tangent)};
  }

  Vec3 to_world(double x, double y, double z = 0.0) const {
    return origin + x * normal + y * binormal + z * tangent;
  }
};

/// Closed interval used for every bounded parameter.
struct ParamRange {
  double lo = 0.0;
  double hi = 1.0;

  constexpr bool contains(double x) const { return x >= lo && x <= hi; }
  constexpr double width() const { return hi - lo; }
};

}  // namespace sweep
