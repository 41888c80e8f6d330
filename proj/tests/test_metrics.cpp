#include "doctest.h"
#include "support.hpp"

#include "sweep/errors.hpp"
#include "sweep/fixtures.hpp"
#include "sweep/field.hpp"
#include "sweep/metrics.hpp"

#include <numbers>
#include <cmath>
#include <limits>

using namespace sweep;
using doctest::Approx;

namespace {

PointList random_points(Rng& rng, std::size_t n) {
  PointList out(n);
  for (Vec3& p : out) {
    const double x = rng.uniform(-0.5, 0.5), y = rng.uniform(-0.5, 0.5), z = rng.uniform(-0.5, 0.5);
    p = Vec3(x, y, z);
  }
  return out;
}

double brute_nearest(const Vec3& q, const PointList& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& p : set) best = std::min(best, (p - q).norm());
  return best;
}

}  // namespace

TEST_CASE("voxel IoU") {
  VoxelGrid a(4), b(4);
  CHECK(voxel_iou(a, b) == 1.0);
  a.set(0, 0, 0, true);
  a.set(1, 0, 0, true);
  CHECK(voxel_iou(a, a) == 1.0);
  b.set(3, 3, 3, true);
  b.set(2, 3, 3, true);
  CHECK(voxel_iou(a, b) == 0.0);
  b.set(2, 3, 3, false);
  b.set(1, 0, 0, true);
  CHECK(voxel_iou(a, b) == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(voxel_iou(a, b) == voxel_iou(b, a));
  CHECK_THROWS_AS(voxel_iou(a, VoxelGrid(5)), DimensionError);
}

TEST_CASE("chamfer distance") {
  Rng rng(1);
  const PointList x = random_points(rng, 300);
  CHECK(chamfer_distance(x, x) == 0.0);
  CHECK(chamfer_distance({Vec3(0, 0, 0)}, {Vec3(0, 0, 1)}) == 1.0);
  CHECK(chamfer_distance({Vec3(0, 0, 0)}, {Vec3(0, 0, 2)}, true) == 4.0);
  CHECK_THROWS_AS(chamfer_distance({}, x), DomainError);

  const PointList a = random_points(rng, 500), b = random_points(rng, 500);
  double ab = 0.0, ba = 0.0;
  for (const Vec3& p : a) ab += brute_nearest(p, b);
  for (const Vec3& p : b) ba += brute_nearest(p, a);
  const double ref = 0.5 * ab / 500.0 + 0.5 * ba / 500.0;
  CHECK(std::abs(chamfer_distance(a, b) - ref) < 1e-12);
  CHECK(chamfer_distance(a, b) == chamfer_distance(b, a));
  PointList shuffled = a;
  std::swap(shuffled[0], shuffled[499]);
  CHECK(chamfer_distance(a, shuffled) == 0.0);
  PointList moved = a;
  moved[7].x() += 1e-6;
  CHECK(chamfer_distance(a, moved) > 0.0);
}

TEST_CASE("nearest neighbours match brute force") {
  Rng rng(2);
  const PointList data = random_points(rng, 500), queries = random_points(rng, 500);
  const KdTree tree(data);
  for (const Vec3& q : queries) {
    const auto [index, d2] = tree.nearest(q);
    CHECK(std::abs(std::sqrt(d2) - brute_nearest(q, data)) < 1e-12);
    CHECK((data[index] - q).squaredNorm() == d2);
  }
  // Duplicates and ties resolve to the lowest index.
  const KdTree dup(PointList(20, Vec3(0.1, 0.2, 0.3)));
  CHECK(dup.nearest(Vec3(0, 0, 0)).first == 0);
  CHECK_THROWS_AS(KdTree(PointList{}), DomainError);
}

TEST_CASE("F-score") {
  Rng rng(3);
  const PointList x = random_points(rng, 200);
  CHECK(f_score(x, x) == 1.0);
  PointList far = x;
  for (Vec3& p : far) p.x() += 10.0 * 0.05 + 1.0;
  CHECK(f_score(x, far) == 0.0);
  CHECK(f_score({Vec3(0, 0, 0)}, {Vec3(0, 0, 0), Vec3(1, 0, 0)}) == Approx(2.0 / 3.0).epsilon(1e-15));
  const PointList y = random_points(rng, 150);
  CHECK(f_score(x, y, 0.08) == f_score(y, x, 0.08));
  CHECK_THROWS_AS(f_score(x, y, 0.0), DomainError);
  CHECK_THROWS_AS(f_score(x, {}), DomainError);
}

TEST_CASE("metrics are bit-stable across thread counts") {
  Rng rng(4);
  const PointList a = random_points(rng, 3000), b = random_points(rng, 2000);
  const double c1 = chamfer_distance(a, b, false, 1);
  CHECK(chamfer_distance(a, b, false, 4) == c1);
  CHECK(chamfer_distance(a, b, false, 7) == c1);
  CHECK(f_score(a, b, 0.05, 1) == f_score(a, b, 0.05, 5));
  Assembly asm1;
  asm1.primitives = {test::random_primitive(rng)};
  asm1.gates = {1.0};
  CHECK(voxelize_assembly(asm1, 24, 512, 0.5, 1) == voxelize_assembly(asm1, 24, 512, 0.5, 3));
}

TEST_CASE("voxel iso-surface") {
  for (const char* name : {"sphere", "box", "cylinder", "l_tube"}) {
    const VoxelGrid g = fixtures::make(name, 24);
    const TriMesh m = voxel_surface(g);
    CHECK(is_closed(m));
    CHECK(euler_characteristic(m) == 2);
    // Rasterizing the surface gives the grid back.
    CHECK(voxel_iou(g, rasterize_mesh(m, g.resolution())) >= 0.95);
  }
  const VoxelGrid torus = fixtures::make("torus_half_arc", 32);
  CHECK(voxel_iou(torus, rasterize_mesh(voxel_surface(torus), 32)) >= 0.95);
  CHECK(voxel_surface(VoxelGrid(6)).triangles.empty());
  VoxelGrid one(3);
  one.set(1, 1, 1, true);
  CHECK(is_closed(voxel_surface(one)));
}

TEST_CASE("assembly evaluation") {
  const SweepPrimitive p = test::straight_primitive(Vec3(0, 0, -0.3), Vec3(0, 0, 0.3), 0.15, 0.15, 2.0);
  Assembly a;
  a.primitives = {p};
  a.gates = {1.0};
  const VoxelGrid vox = voxelize_assembly(a, 32);
  CHECK(vox.count() > 0);
  CHECK(vox == rasterize(32, [&](const Vec3& q) { return oracle_occupancy(p, q) == 1; }));
  const MetricReport r = evaluate_assembly(a, vox, 0.05, 1);
  CHECK(r.iou == 1.0);
  CHECK(r.threshold == 0.05);
  CHECK(r.chamfer < 0.02);
  CHECK(r.f1 > 0.99);
  CHECK_THROWS_AS(evaluate_assembly(a, VoxelGrid(32)), DomainError);

  // Identical surface sources.
  Rng r1(9), r2(9);
  const TriMesh mesh = sweep_mesh(p, 32, 32);
  CHECK(chamfer_distance(sample_surface(mesh, 4000, r1), sample_surface(mesh, 4000, r2)) <= 1e-6);
}

TEST_CASE("assembly surface samples skip covered points") {
  const SweepPrimitive big = test::straight_primitive(Vec3(0, 0, -0.3), Vec3(0, 0, 0.3), 0.2, 0.2, 2.0);
  const SweepPrimitive inner = test::straight_primitive(Vec3(0, 0, -0.1), Vec3(0, 0, 0.1), 0.05, 0.05, 2.0);
  Assembly a;
  a.primitives = {big, inner};
  a.gates = {1.0, 1.0};
  Rng rng(5);
  SurfaceSampling s;
  s.count = 2000;
  const PointList pts = assembly_surface_samples(a, s, rng);
  CHECK(pts.size() == 2000);
  // Strictly inside the big cylinder's mesh (64-gon sides, flat caps).
  const double apothem = 0.2 * std::cos(std::numbers::pi / 64);
  int covered = 0;
  for (const Vec3& q : pts) covered += std::abs(q.z()) < 0.3 - 1e-9 && std::hypot(q.x(), q.y()) < apothem - 1e-9;
  CHECK(covered == 0);
  a.gates = {0.0, 0.0};
  CHECK_THROWS_AS(assembly_surface_samples(a, s, rng), DomainError);
}
