#pragma once

#include "sweep/assembly.hpp"
#include "sweep/mesh.hpp"
#include "sweep/voxel.hpp"

#include <cstdint>
#include <vector>

namespace sweep {

/// Exact nearest-neighbour queries over a fixed point set.
class KdTree {
 public:
  explicit KdTree(PointList points);

  /// Index of the nearest point (lowest index among exact ties) and its
  /// squared distance.
  std::pair<std::size_t, double> nearest(const Vec3& query) const;
  const PointList& points() const { return points_; }

 private:
  struct Node {
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
    int first = 0, count = 0;
  };
  int build(int first, int count);
  void search(int node, const Vec3& q, std::size_t& best, double& best_d) const;

  PointList points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// Distance from every point of `from` to its nearest point of `to`.
std::vector<double> nearest_distances(const PointList& from, const PointList& to, int threads = 1);

/// |a and b| / |a or b|; 1 when both are empty.
double voxel_iou(const VoxelGrid& a, const VoxelGrid& b);

/// 0.5 mean_x min_y |x - y| + 0.5 mean_y min_x |x - y|; squared distances
/// when `squared`.
double chamfer_distance(const PointList& x, const PointList& y, bool squared = false, int threads = 1);

/// Harmonic mean of precision (x within tau of y) and recall (y within tau
/// of x); 0 when both vanish.
double f_score(const PointList& x, const PointList& y, double tau = 0.05, int threads = 1);

struct MetricReport {
  double iou = 0.0;
  double chamfer = 0.0;
  double f1 = 0.0;
  double threshold = 0.05;
};

/// Iso-surface at 0.5 of the cell-centre occupancy (unoccupied outside the
/// lattice) by marching tetrahedra; closed and outward oriented.
TriMesh voxel_surface(const VoxelGrid& grid);

/// Cells whose centre lies inside the (ray-parity) mesh.
VoxelGrid rasterize_mesh(const TriMesh& mesh, int resolution);

/// Cells whose centre some selected primitive's oracle contains.
VoxelGrid voxelize_assembly(const Assembly& assembly, int resolution, int dense_frames = 512,
                            double threshold = 0.5, int threads = 1);

struct SurfaceSampling {
  std::size_t count = 16384;
  int frames = 128;
  int contour = 64;
  int dense_frames = 512;
};

/// Area-uniform samples of the selected primitives' swept meshes, dropping
/// points inside any other selected primitive.
PointList assembly_surface_samples(const Assembly& assembly, const SurfaceSampling& sampling, Rng& rng,
                                   double threshold = 0.5);

/// IoU of the voxelized assembly against the grid, and Chamfer and F1
/// between surface samples of both.
MetricReport evaluate_assembly(const Assembly& assembly, const VoxelGrid& grid, double tau = 0.05,
                               std::uint64_t seed = 0, const SurfaceSampling& sampling = {}, int threads = 1);

}  // namespace sweep
