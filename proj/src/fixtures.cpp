#include "sweep/fixtures.hpp"

#include "sweep/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sweep::fixtures {

namespace {

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - a - t * ab).norm();
}

}  // namespace

bool cylinder(const Vec3& p) { return std::hypot(p.x(), p.y()) <= 0.15 && std::abs(p.z()) <= 0.35; }

bool tapered_capsule(const Vec3& p) {
  // Dense ball centres make the union exact to well below a cell.
  constexpr int kBalls = 601;
  const double rho = std::hypot(p.x(), p.y());
  for (int i = 0; i < kBalls; ++i) {
    const double t = static_cast<double>(i) / (kBalls - 1);
    const double z = -0.3 + 0.6 * t;
    const double r = 0.2 * (1.0 - 0.35 * t - 0.25 * t * t);
    if (rho * rho + (p.z() - z) * (p.z() - z) <= r * r) return true;
  }
  return false;
}

bool l_tube(const Vec3& p) {
  const Vec3 a(-0.25, 0.3, 0.0), b(-0.25, -0.25, 0.0), c(0.3, -0.25, 0.0);
  return std::min(segment_distance(p, a, b), segment_distance(p, b, c)) <= 0.1;
}

bool torus_half_arc(const Vec3& p) {
  if (p.y() < 0.0) return false;
  const double ring = std::hypot(p.x(), p.y()) - 0.3;
  return ring * ring + p.z() * p.z() <= 0.1 * 0.1;
}

bool sphere(const Vec3& p) { return p.norm() <= 0.35; }

VoxelGrid box_cells(int resolution, const int lo[3], const int hi[3]) {
  VoxelGrid grid(resolution);
  for (int k = lo[2]; k < hi[2]; ++k) {
    for (int j = lo[1]; j < hi[1]; ++j) {
      for (int i = lo[0]; i < hi[0]; ++i) grid.set(i, j, k, true);
    }
  }
  return grid;
}

std::vector<std::string> names() { return {"cylinder", "tapered_capsule", "l_tube", "torus_half_arc", "sphere", "box"}; }

VoxelGrid make(const std::string& name, int resolution) {
  if (name == "cylinder") return rasterize(resolution, cylinder);
  if (name == "tapered_capsule") return rasterize(resolution, tapered_capsule);
  if (name == "l_tube") return rasterize(resolution, l_tube);
  if (name == "torus_half_arc") return rasterize(resolution, torus_half_arc);
  if (name == "sphere") return rasterize(resolution, sphere);
  if (name == "box") {
    const int lo[3] = {4, 16, 16}, hi[3] = {36, 24, 24};
    return box_cells(40, lo, hi);
  }
  throw DomainError("unknown fixture '" + name + "'");
}

}  // namespace sweep::fixtures
