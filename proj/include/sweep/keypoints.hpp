#pragma once

#include "sweep/frames.hpp"

#include <vector>

namespace sweep {

/// Key points of one primitive: axis samples and frame-transformed slices.
struct KeyPointCloud {
  PointList axis_points;
  std::vector<PointList> slice_points;  // one contour per frame

  std::size_t size() const;
  PointList flatten() const;  // axis points first, then slices in frame order
};

inline constexpr int kAxisKeypoints = 124;
inline constexpr int kSliceFrames = 15;
inline constexpr int kContourPoints = 50;

KeyPointCloud sample_keypoints(const SweepPrimitive& primitive, int axis_count = kAxisKeypoints,
                               int frame_count = kSliceFrames, int contour_count = kContourPoints);

}  // namespace sweep
