#include "sweep/edit.hpp"

#include "sweep/errors.hpp"

#include <cmath>
#include <numbers>

namespace sweep {

namespace {

// Exact values at multiples of 90 degrees.
void sin_cos_degrees(double degrees, double& s, double& c) {
  const double turns = degrees / 90.0;
  if (turns == std::round(turns)) {
    const long q = ((static_cast<long>(std::round(turns)) % 4) + 4) % 4;
    static const double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    static const double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    s = kSin[q];
    c = kCos[q];
    return;
  }
  const double r = degrees * std::numbers::pi / 180.0;
  s = std::sin(r);
  c = std::cos(r);
}

}  // namespace

SweepPrimitive rotate_primitive(const SweepPrimitive& primitive, char axis, double degrees) {
  int u = 0, v = 0;
  switch (axis) {
    case 'x': u = 1, v = 2; break;
    case 'y': u = 2, v = 0; break;
    case 'z': u = 0, v = 1; break;
    default: throw DomainError(std::string("rotation axis must be x, y or z, got '") + axis + "'");
  }
  if (!std::isfinite(degrees)) throw DomainError("rotation angle must be finite");
  double s = 0.0, c = 1.0;
  sin_cos_degrees(degrees, s, c);
  std::vector<Vec3> ctrl = primitive.axis.control_points();
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : ctrl) centroid += p;
  centroid /= static_cast<double>(ctrl.size());
  for (Vec3& p : ctrl) {
    const double du = p[u] - centroid[u], dv = p[v] - centroid[v];
    p[u] = centroid[u] + c * du - s * dv;
    p[v] = centroid[v] + s * du + c * dv;
  }
  SweepPrimitive out = primitive;
  out.axis = SweepAxis(std::move(ctrl));
  return out;
}

SweepPrimitive translate_primitive(const SweepPrimitive& primitive, const Vec3& offset) {
  std::vector<Vec3> ctrl = primitive.axis.control_points();
  for (Vec3& p : ctrl) p += offset;
  SweepPrimitive out = primitive;
  out.axis = SweepAxis(std::move(ctrl));
  return out;
}

SweepPrimitive set_scaling_coeff(const SweepPrimitive& primitive, int j, double value) {
  if (j < 0 || j >= primitive.k()) {
    throw DimensionError("scaling coefficient index " + std::to_string(j) + " out of range for k = " +
                         std::to_string(primitive.k()));
  }
  SweepPrimitive out = primitive;
  out.scaling.coeffs[j] = value;
  return out;
}

SweepPrimitive set_profile_param(const SweepPrimitive& primitive, char name, double value) {
  SweepPrimitive out = primitive;
  switch (name) {
    case 'a': out.profile.a = value; break;
    case 'b': out.profile.b = value; break;
    case 'd': out.profile.d = value; break;
    default: throw DomainError(std::string("profile parameter must be a, b or d, got '") + name + "'");
  }
  return out;
}

}  // namespace sweep
