#include "sweep/metrics.hpp"

#include "sweep/errors.hpp"
#include "sweep/field.hpp"
#include "sweep/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

namespace sweep {

KdTree::KdTree(PointList points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("nearest-neighbour structure over an empty point set");
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(2 * points_.size() / 4 + 2);
  build(0, static_cast<int>(points_.size()));
}

int KdTree::build(int first, int count) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (count <= 8) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  Eigen::AlignedBox3d box;
  box.setEmpty();
  for (int i = first; i < first + count; ++i) box.extend(points_[order_[i]]);
  int axis = 0;
  box.sizes().maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count, [&](int a, int b) {
    const double pa = points_[a][axis], pb = points_[b][axis];
    return pa < pb || (pa == pb && a < b);
  });
  nodes_[index].axis = axis;
  nodes_[index].split = points_[order_[mid]][axis];
  const int left = build(first, mid - first);
  const int right = build(mid, first + count - mid);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

void KdTree::search(int node_index, const Vec3& q, std::size_t& best, double& best_d) const {
  const Node& node = nodes_[node_index];
  if (node.axis < 0) {
    for (int i = node.first; i < node.first + node.count; ++i) {
      const auto idx = static_cast<std::size_t>(order_[i]);
      const double d = (points_[idx] - q).squaredNorm();
      if (d < best_d || (d == best_d && idx < best)) {
        best_d = d;
        best = idx;
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search(near, q, best, best_d);
  // <= keeps equal-distance candidates reachable for the index tie-break
  if (diff * diff <= best_d) search(far, q, best, best_d);
}

std::pair<std::size_t, double> KdTree::nearest(const Vec3& query) const {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_d = std::numeric_limits<double>::infinity();
  search(0, query, best, best_d);
  return {best, best_d};
}

std::vector<double> nearest_distances(const PointList& from, const PointList& to, int threads) {
  const KdTree tree(to);
  std::vector<double> out(from.size());
  parallel_for(from.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = std::sqrt(tree.nearest(from[i]).second);
  });
  return out;
}

double voxel_iou(const VoxelGrid& a, const VoxelGrid& b) {
  if (a.resolution() != b.resolution()) {
    throw DimensionError("IoU needs equal resolutions, got " + std::to_string(a.resolution()) + " and " +
                         std::to_string(b.resolution()));
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a.cells()[i] != 0, y = b.cells()[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

void require_points(const PointList& x, const PointList& y) {
  if (x.empty() || y.empty()) throw DomainError("point-set metric needs two nonempty sets");
}

double mean(const std::vector<double>& v, bool squared) {
  double s = 0.0;
  for (double d : v) s += squared ? d * d : d;
  return s / static_cast<double>(v.size());
}

}  // namespace

double chamfer_distance(const PointList& x, const PointList& y, bool squared, int threads) {
  require_points(x, y);
  return 0.5 * mean(nearest_distances(x, y, threads), squared) + 0.5 * mean(nearest_distances(y, x, threads), squared);
}

double f_score(const PointList& x, const PointList& y, double tau, int threads) {
  require_points(x, y);
  if (!(tau > 0.0)) throw DomainError("F-score threshold must be positive");
  auto within = [tau](const std::vector<double>& d) {
    std::size_t c = 0;
    for (double v : d) c += v <= tau;
    return static_cast<double>(c) / static_cast<double>(d.size());
  };
  const double precision = within(nearest_distances(x, y, threads));
  const double recall = within(nearest_distances(y, x, threads));
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

TriMesh voxel_surface(const VoxelGrid& grid) {
  const int r = grid.resolution();
  const double h = grid.spacing();
  auto corner = [&](int i, int j, int k) { return Vec3(-0.5 + (i + 0.5) * h, -0.5 + (j + 0.5) * h, -0.5 + (k + 0.5) * h); };
  static const int kCube[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  // Six tetrahedra around the 0-6 diagonal; shared faces match between cubes.
  static const int kTets[6][4] = {{0, 5, 1, 6}, {0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6}, {0, 7, 4, 6}, {0, 4, 5, 6}};
  TriMesh mesh;
  // Edge midpoints are computed identically from every cube, so exact keys weld them.
  std::map<std::array<double, 3>, int> welded;
  auto vertex = [&](const Vec3& p) {
    const auto [it, fresh] = welded.try_emplace({p.x(), p.y(), p.z()}, static_cast<int>(mesh.vertices.size()));
    if (fresh) mesh.vertices.push_back(p);
    return it->second;
  };
  auto emit = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& outward) {
    if ((b - a).cross(c - a).dot(outward) >= 0.0) {
      mesh.triangles.push_back({vertex(a), vertex(b), vertex(c)});
    } else {
      mesh.triangles.push_back({vertex(a), vertex(c), vertex(b)});
    }
  };
  for (int k = -1; k < r; ++k) {
    for (int j = -1; j < r; ++j) {
      for (int i = -1; i < r; ++i) {
        std::array<bool, 8> in{};
        int count = 0;
        for (int c = 0; c < 8; ++c) {
          in[c] = grid.occupied(i + kCube[c][0], j + kCube[c][1], k + kCube[c][2]);
          count += in[c];
        }
        if (count == 0 || count == 8) continue;
        std::array<Vec3, 8> p;
        for (int c = 0; c < 8; ++c) p[c] = corner(i + kCube[c][0], j + kCube[c][1], k + kCube[c][2]);
        for (const auto& tet : kTets) {
          std::vector<int> inside, outside;
          for (int v : tet) (in[v] ? inside : outside).push_back(v);
          if (inside.empty() || outside.empty()) continue;
          auto mid = [&](int a, int b) { return 0.5 * (p[a] + p[b]); };
          Vec3 ci = Vec3::Zero(), co = Vec3::Zero();
          for (int v : inside) ci += p[v];
          for (int v : outside) co += p[v];
          const Vec3 outward = co / static_cast<double>(outside.size()) - ci / static_cast<double>(inside.size());
          if (inside.size() == 1 || outside.size() == 1) {
            const bool lone_in = inside.size() == 1;
            const int apex = lone_in ? inside[0] : outside[0];
            const auto& rest = lone_in ? outside : inside;
            emit(mid(apex, rest[0]), mid(apex, rest[1]), mid(apex, rest[2]), outward);
          } else {
            const Vec3 a = mid(inside[0], outside[0]), b = mid(inside[0], outside[1]);
            const Vec3 c = mid(inside[1], outside[1]), d = mid(inside[1], outside[0]);
            emit(a, b, c, outward);
            emit(a, c, d, outward);
          }
        }
      }
    }
  }
  return mesh;
}

VoxelGrid rasterize_mesh(const TriMesh& mesh, int resolution) {
  VoxelGrid grid(resolution);
  if (mesh.triangles.empty()) return grid;
  const TriangleBVH bvh(mesh);
  for (std::size_t c = 0; c < grid.size(); ++c) grid.cells()[c] = bvh.inside_parity(grid.center(c)) ? 1 : 0;
  return grid;
}

VoxelGrid voxelize_assembly(const Assembly& assembly, int resolution, int dense_frames, double threshold,
                            int threads) {
  check_assembly(assembly);
  std::vector<OracleSweep> oracles;
  for (int i : assembly.selected(threshold)) oracles.emplace_back(assembly.primitives[i], dense_frames);
  VoxelGrid grid(resolution);
  parallel_for(grid.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const Vec3 q = grid.center(c);
      bool inside = false;
      for (const auto& o : oracles) {
        if (o.contains(q)) {
          inside = true;
          break;
        }
      }
      grid.cells()[c] = inside ? 1 : 0;
    }
  });
  return grid;
}

PointList assembly_surface_samples(const Assembly& assembly, const SurfaceSampling& sampling, Rng& rng,
                                   double threshold) {
  check_assembly(assembly);
  const auto chosen = assembly.selected(threshold);
  if (chosen.empty()) throw DomainError("no selected primitive to sample");
  std::vector<TriMesh> meshes;
  std::vector<OracleSweep> oracles;
  for (int i : chosen) {
    meshes.push_back(sweep_mesh(assembly.primitives[i], sampling.frames, sampling.contour));
    oracles.emplace_back(assembly.primitives[i], sampling.dense_frames);
  }
  // Draw by area over the whole union, tagging each sample with its owner.
  std::vector<double> area(meshes.size());
  double total = 0.0;
  for (std::size_t m = 0; m < meshes.size(); ++m) total += area[m] = surface_area(meshes[m]);
  PointList out;
  out.reserve(sampling.count);
  const std::size_t max_rounds = 64;
  for (std::size_t round = 0; round < max_rounds && out.size() < sampling.count; ++round) {
    const std::size_t batch = sampling.count - out.size();
    for (std::size_t m = 0; m < meshes.size() && out.size() < sampling.count; ++m) {
      const auto want = static_cast<std::size_t>(std::ceil(static_cast<double>(batch) * area[m] / total));
      for (const Vec3& p : sample_surface(meshes[m], want, rng)) {
        bool covered = false;
        for (std::size_t o = 0; o < oracles.size() && !covered; ++o) covered = o != m && oracles[o].contains(p);
        if (!covered && out.size() < sampling.count) out.push_back(p);
      }
    }
  }
  if (out.empty()) throw DomainError("every surface sample lies inside another primitive");
  return out;
}

MetricReport evaluate_assembly(const Assembly& assembly, const VoxelGrid& grid, double tau, std::uint64_t seed,
                               const SurfaceSampling& sampling, int threads) {
  if (grid.count() == 0) throw DomainError("cannot evaluate against an empty shape");
  MetricReport report;
  report.threshold = tau;
  report.iou = voxel_iou(grid, voxelize_assembly(assembly, grid.resolution(), sampling.dense_frames, 0.5, threads));
  Rng rng(seed);
  const PointList target = sample_surface(voxel_surface(grid), sampling.count, rng);
  const PointList pred = assembly_surface_samples(assembly, sampling, rng);
  report.chamfer = chamfer_distance(target, pred, false, threads);
  report.f1 = f_score(pred, target, tau, threads);
  return report;
}

}  // namespace sweep
