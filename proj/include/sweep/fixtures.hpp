#pragma once

#include "sweep/voxel.hpp"

#include <string>
#include <vector>

namespace sweep {

/// Synthetic solids used by tests, the acceptance suite and the
/// `fixture` CLI helper. All lie inside [-0.5, 0.5]^3.
namespace fixtures {

/// Cylinder of radius 0.15 along z over [-0.35, 0.35].
bool cylinder(const Vec3& p);
/// Balls centred on the z axis over [-0.3, 0.3] with radius
/// 0.2 (1 - 0.35 t - 0.25 t^2), t = (z + 0.3) / 0.6; a cone-like capsule.
bool tapered_capsule(const Vec3& p);
/// Tube of radius 0.1 around the polyline (-0.25, 0.3, 0) -> (-0.25, -0.25, 0) -> (0.3, -0.25, 0).
bool l_tube(const Vec3& p);
/// Half of a torus (major 0.3, minor 0.1) in the xy plane, y >= 0.
bool torus_half_arc(const Vec3& p);
/// Ball of radius 0.35.
bool sphere(const Vec3& p);

/// Axis-aligned box of cells [lo, hi) per axis.
VoxelGrid box_cells(int resolution, const int lo[3], const int hi[3]);

std::vector<std::string> names();
/// Named fixture at a resolution; "box" is a centred 32 x 8 x 8 cell box in
/// a 40^3 grid whatever the resolution asked for.
VoxelGrid make(const std::string& name, int resolution);

}  // namespace fixtures
}  // namespace sweep
