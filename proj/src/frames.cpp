#include "sweep/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sweep {

namespace {

Frame to_frame(const FrameT<double>& f) { return {f.origin, f.tangent, f.normal, f.binormal}; }

constexpr int kFrameAtResolution = 1024;

}  // namespace

std::vector<Frame> parallel_transport_frames(const SweepAxis& axis, int m) {
  const auto raw =
      transport_frames<double>(std::span<const Vec3>(axis.control_points()), axis.knots(), m);
  std::vector<Frame> out;
  out.reserve(raw.size());
  for (const auto& f : raw) out.push_back(to_frame(f));
  return out;
}

Frame frame_at(const SweepAxis& axis, double t) {
  t = clamp_unit(t);
  const std::span<const Vec3> ctrl(axis.control_points());
  FrameT<double> f;
  f.origin = axis.point(0.0);
  f.tangent = spline_tangent<double>(ctrl, axis.knots(), 0.0);
  f.normal = seed_normal<double>(f.tangent);
  const int steps = std::max(1, static_cast<int>(std::ceil(t * kFrameAtResolution)));
  for (int i = 1; i <= steps; ++i) {
    const double ti = t * static_cast<double>(i) / static_cast<double>(steps);
    const Vec3 tangent = spline_tangent<double>(ctrl, axis.knots(), ti);
    if ((tangent - f.tangent).norm() <= kSameTangent) continue;
    Vec3 nrm = minimal_rotate<double>(f.tangent, tangent, f.normal);
    nrm -= nrm.dot(tangent) * tangent;
    f.normal = nrm.normalized();
    f.tangent = tangent;
  }
  f.origin = axis.point(t);
  f.binormal = f.tangent.cross(f.normal);
  return to_frame(f);
}

std::vector<Vec3> profile_slice(const SweepPrimitive& primitive, const Frame& frame, double t,
                                int num_points) {
  if (num_points < 1) throw DomainError("profile slice needs at least one point");
  const double s = scaling_value(primitive.scaling, t);
  std::vector<Vec3> out(static_cast<std::size_t>(num_points));
  for (int j = 0; j < num_points; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(num_points);
    const Vec2 p = s * profile_point(primitive.profile, theta);
    out[j] = frame.to_world(p.x(), p.y());
  }
  return out;
}

std::vector<Vec3> profile_slice(const SweepPrimitive& primitive, double t, int num_points) {
  return profile_slice(primitive, frame_at(primitive.axis, t), t, num_points);
}

}  // namespace sweep
