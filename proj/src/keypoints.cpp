#include "sweep/keypoints.hpp"

#include "sweep/errors.hpp"

namespace sweep {

std::size_t KeyPointCloud::size() const {
  std::size_t total = axis_points.size();
  for (const auto& s : slice_points) total += s.size();
  return total;
}

PointList KeyPointCloud::flatten() const {
  PointList out = axis_points;
  for (const auto& s : slice_points) out.insert(out.end(), s.begin(), s.end());
  return out;
}

KeyPointCloud sample_keypoints(const SweepPrimitive& primitive, int axis_count, int frame_count, int contour_count) {
  if (axis_count < 2 || frame_count < 2 || contour_count < 2) {
    throw DomainError("key-point counts must be at least 2");
  }
  KeyPointCloud cloud;
  cloud.axis_points.reserve(static_cast<std::size_t>(axis_count));
  for (int i = 0; i < axis_count; ++i) {
    cloud.axis_points.push_back(primitive.axis.point(static_cast<double>(i) / static_cast<double>(axis_count - 1)));
  }
  const auto frames = parallel_transport_frames(primitive.axis, frame_count);
  cloud.slice_points.reserve(frames.size());
  for (int i = 0; i < frame_count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(frame_count - 1);
    cloud.slice_points.push_back(profile_slice(primitive, frames[i], t, contour_count));
  }
  return cloud;
}

}  // namespace sweep
