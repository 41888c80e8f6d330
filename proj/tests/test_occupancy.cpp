#include "doctest.h"
#include "support.hpp"

#include "sweep/errors.hpp"
#include "sweep/field.hpp"
#include "sweep/frames.hpp"
#include "sweep/keypoints.hpp"
#include "sweep/mesh.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <sstream>

using namespace sweep;
using doctest::Approx;

namespace {

// Queries in the soft transition band, where every parameter matters.
std::vector<Vec3> band_queries(const SweepPrimitive& p, const SoftField& f, Rng& rng, std::size_t want) {
  std::vector<Vec3> out;
  for (int tries = 0; tries < 200000 && out.size() < want; ++tries) {
    const Vec3 q = p.axis.point(rng.uniform(0.05, 0.95)) +
                   0.3 * Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double v = f.value(q);
    if (v > 0.05 && v < 0.95) out.push_back(q);
  }
  return out;
}

SweepPrimitive curved_primitive() {
  SweepPrimitive p;
  p.axis = SweepAxis({Vec3(-0.213, -0.12, -0.25), Vec3(0.05, 0.15, 0.0), Vec3(0.2, -0.05, 0.25)});
  p.profile = {0.15, 0.1, 2.5};
  p.scaling.coeffs = {0.1, -0.15};
  return p;
}

}  // namespace

TEST_CASE("key points") {
  Rng rng(1);
  const SweepPrimitive p = test::random_primitive(rng);
  const KeyPointCloud cloud = sample_keypoints(p);
  CHECK(cloud.axis_points.size() == 124);
  CHECK(cloud.slice_points.size() == 15);
  for (const auto& s : cloud.slice_points) CHECK(s.size() == 50);
  CHECK(cloud.size() == 874);
  CHECK(cloud.flatten().size() == 874);
  for (std::size_t i = 0; i < cloud.axis_points.size(); ++i) {
    CHECK((cloud.axis_points[i] - axis_point(p.axis, i / 123.0)).norm() < 1e-12);
  }
  const SweepPrimitive line = test::straight_primitive(Vec3(0.1, 0, -0.3), Vec3(0.1, 0, 0.3), 0.2, 0.1, 2.0);
  const KeyPointCloud planar = sample_keypoints(line);
  for (std::size_t f = 0; f < planar.slice_points.size(); ++f) {
    const double z = axis_point(line.axis, f / 14.0).z();
    for (const Vec3& q : planar.slice_points[f]) CHECK(std::abs(q.z() - z) < 1e-15);
  }
}

TEST_CASE("swept mesh topology") {
  const SweepPrimitive prism = test::straight_primitive(Vec3(0, 0, -0.2), Vec3(0, 0, 0.2), 0.1, 0.1, 2.0);
  const TriMesh m = sweep_mesh(prism, 2, 3);
  CHECK(m.vertices.size() == 8);
  CHECK(m.triangles.size() == 12);
  CHECK(is_closed(m));
  CHECK(euler_characteristic(m) == 2);
  CHECK_FALSE(m.folded);
  CHECK_THROWS_AS(sweep_mesh(prism, 1, 3), DomainError);
  CHECK_THROWS_AS(sweep_mesh(prism, 2, 2), DomainError);

  Rng rng(14);
  int unfolded = 0;
  for (int trial = 0; trial < 60 && unfolded < 5; ++trial) {
    SweepPrimitive p = test::random_primitive(rng);
    p.profile.a = std::min(p.profile.a, 0.08);
    p.profile.b = std::min(p.profile.b, 0.08);
    const TriMesh mesh = sweep_mesh(p, 64, 24);
    if (mesh.folded) continue;
    ++unfolded;
    CHECK(mesh.vertices.size() == 64 * 24 + 2);
    CHECK(mesh.triangles.size() == 2 * 24 * 63 + 2 * 24);
    CHECK(is_closed(mesh));
    CHECK(euler_characteristic(mesh) == 2);
    // Outward orientation: positive enclosed volume.
    double volume = 0.0;
    for (const auto& t : mesh.triangles) {
      volume += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]])) / 6.0;
    }
    CHECK(volume > 0.0);
  }
  CHECK(unfolded == 5);
}

TEST_CASE("frame aliasing shrinks with frame count") {
  SweepPrimitive p;
  p.axis = SweepAxis({Vec3(-0.35, -0.3, 0), Vec3(0.0, 0.45, 0), Vec3(0.35, -0.3, 0)});
  p.profile = {0.05, 0.05, 2.0};
  p.scaling.coeffs = {0.0, 0.0};
  double length = 0.0;
  for (int i = 1; i <= 2000; ++i) length += (axis_point(p.axis, i / 2000.0) - axis_point(p.axis, (i - 1) / 2000.0)).norm();
  const double spacing = length / 14.0;
  Rng rng(3);
  const double h = mesh_hausdorff(sweep_mesh(p, 200, 48), sweep_mesh(p, 15, 48), 4000, rng);
  CHECK(h > 0.0);
  CHECK(h < 2.0 * spacing);
}

TEST_CASE("OBJ round trip") {
  Rng rng(2);
  const TriMesh m = sweep_mesh(test::random_primitive(rng), 6, 5);
  std::stringstream ss;
  write_obj(ss, m);
  const TriMesh back = read_obj(ss);
  CHECK(back.triangles == m.triangles);
  REQUIRE(back.vertices.size() == m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK((back.vertices[i] - m.vertices[i]).norm() < 1e-8);
  std::stringstream bad("v 0 0 0\nf 1 2 3\n");
  CHECK_THROWS_AS(read_obj(bad), FormatError);
}

TEST_CASE("ray parity and distance on a closed prism") {
  const SweepPrimitive p = test::straight_primitive(Vec3(0, 0, -0.2), Vec3(0, 0, 0.2), 0.1, 0.1, 2.0);
  const TriMesh m = sweep_mesh(p, 2, 64);
  const TriangleBVH bvh(m);
  CHECK(bvh.inside_parity(Vec3(0, 0, 0)));
  CHECK(bvh.inside_winding(Vec3(0.02, -0.03, 0.1)));
  CHECK_FALSE(bvh.inside_parity(Vec3(0.2, 0, 0)));
  CHECK_FALSE(bvh.inside_parity(Vec3(0, 0, 0.3)));
  CHECK(bvh.distance(Vec3(0, 0, 0.5)) == Approx(0.3).epsilon(1e-12));
}

TEST_CASE("soft occupancy examples") {
  const SweepPrimitive fat = test::straight_primitive(Vec3(0, 0, -0.4), Vec3(0, 0, 0.4), 0.3, 0.3, 2.0);
  CHECK(soft_occupancy(fat, Vec3(0, 0, 0)) >= 0.99);
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const SweepPrimitive p = test::random_primitive(rng);
    CHECK(soft_occupancy(p, Vec3(2.5, 2.5, 2.5)) <= 0.01);
    const double v = soft_occupancy(p, Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("oracle occupancy examples") {
  SweepPrimitive p;
  p.axis = SweepAxis({Vec3(0, 0, 0), Vec3(0, 0, 0.5), Vec3(0, 0, 1)});
  p.profile = {0.2, 0.2, 2.0};
  p.scaling.coeffs = {0.0, 0.0};
  CHECK(oracle_occupancy(p, Vec3(0, 0, 0.5)) == 1);
  CHECK(oracle_occupancy(p, Vec3(0.5, 0, 0.5)) == 0);
  CHECK(oracle_occupancy(p, Vec3(0.19, 0, 0.9)) == 1);
  CHECK(oracle_occupancy(p, Vec3(0, 0, 1.05)) == 0);
  CHECK_THROWS_AS(OracleSweep(p, 32), DomainError);
}

TEST_CASE("soft field follows the oracle on a small grid") {
  Rng rng(31);
  const int r = 32;
  for (int trial = 0; trial < 3; ++trial) {
    const SweepPrimitive p = test::random_primitive(rng);
    const SoftField f(p);
    const OracleSweep o(p);
    std::vector<int> label(r * r * r);
    auto idx = [r](int i, int j, int k) { return i + r * (j + r * k); };
    auto centre = [r](int i) { return -0.5 + (i + 0.5) / r; };
    for (int k = 0; k < r; ++k)
      for (int j = 0; j < r; ++j)
        for (int i = 0; i < r; ++i) label[idx(i, j, k)] = o.contains(Vec3(centre(i), centre(j), centre(k)));
    long agree = 0, count = 0;
    for (int k = 0; k < r; ++k)
      for (int j = 0; j < r; ++j)
        for (int i = 0; i < r; ++i) {
          bool band = false;
          for (int dk = -1; dk <= 1; ++dk)
            for (int dj = -1; dj <= 1; ++dj)
              for (int di = -1; di <= 1; ++di) {
                const int a = i + di, b = j + dj, c = k + dk;
                if (a >= 0 && b >= 0 && c >= 0 && a < r && b < r && c < r && label[idx(a, b, c)] != label[idx(i, j, k)]) band = true;
              }
          if (band) continue;
          ++count;
          agree += (f.value(Vec3(centre(i), centre(j), centre(k))) >= 0.5) == (label[idx(i, j, k)] != 0);
        }
    CHECK(static_cast<double>(agree) / count >= 0.97);
  }
}

TEST_CASE("analytic field gradient") {
  const SweepPrimitive p = curved_primitive();
  const SoftField f(p, {}, true);
  Rng rng(4);
  const auto qs = band_queries(p, f, rng, 12);
  REQUIRE(qs.size() == 12);
  std::vector<double> g(p.param_count());
  double worst = 0.0;
  for (const Vec3& q : qs) {
    CHECK(f.value_and_gradient(q, g) == Approx(f.value(q)).epsilon(1e-14));
    auto x = pack_params(p);
    for (std::size_t j = 0; j < x.size(); ++j) {
      auto xp = x, xm = x;
      xp[j] += 1e-6;
      xm[j] -= 1e-6;
      const double fd = (SoftField(unpack_params(xp, 3, 2)).value(q) - SoftField(unpack_params(xm, 3, 2)).value(q)) / 2e-6;
      worst = std::max(worst, std::abs(fd - g[j]) / (1.0 + std::abs(fd)));
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("finite-difference gradients converge at second order") {
  const SweepPrimitive p = curved_primitive();
  const SoftField f(p, {}, true);
  Rng rng(7);
  const auto qs = band_queries(p, f, rng, 8);
  const auto z = encode_params(pack_params(p), 3, 2);
  const auto jac = decode_jacobian(z, 3, 2);
  Eigen::MatrixXd exact(qs.size(), z.size());
  std::vector<double> g(z.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    f.value_and_gradient(qs[i], g);
    for (std::size_t j = 0; j < g.size(); ++j) exact(i, j) = g[j] * jac[j];
  }
  const double h = 1e-3;
  const double ratio = (grad_params(p, qs, {}, 2 * h) - exact).norm() / (grad_params(p, qs, {}, h) - exact).norm();
  CHECK(ratio == Approx(4.0).epsilon(0.125));
}

TEST_CASE("gradient vanishes far outside") {
  Rng rng(8);
  const SweepPrimitive p = test::random_primitive(rng);
  const std::vector<Vec3> far = {Vec3(3, 0, 0), Vec3(0, -3, 1), Vec3(2, 2, 2)};
  const auto rows = grad_params(p, far);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) CHECK(rows.row(i).norm() <= 1e-3);
}

TEST_CASE("translation consistency") {
  const SweepPrimitive p = curved_primitive();
  const double delta = 0.03;
  SweepPrimitive moved = p;
  for (Vec3& c : moved.axis.mutable_control_points()) c.x() += delta;
  moved.axis = SweepAxis(moved.axis.control_points());
  const SoftField f(p, {}, true), fm(moved, {}, true);
  Rng rng(9);
  const auto qs = band_queries(p, f, rng, 10);
  std::vector<double> g(p.param_count()), gm(p.param_count());
  for (const Vec3& q : qs) {
    const Vec3 shifted = q + Vec3(delta, 0, 0);
    CHECK(fm.value_and_gradient(shifted, gm) == Approx(f.value_and_gradient(q, g)).epsilon(1e-12));
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(gm[j] - g[j]) <= 1e-4 * (1.0 + std::abs(g[j])));
    // Control x gradients sum to minus the query x derivative.
    const double dq = (f.value(q + Vec3(1e-6, 0, 0)) - f.value(q - Vec3(1e-6, 0, 0))) / 2e-6;
    double sum = 0.0;
    for (int i = 0; i < p.n(); ++i) sum += g[3 * i];
    CHECK(std::abs(sum + dq) <= 1e-4 * (1.0 + std::abs(dq)));
  }
}

TEST_CASE("rigid invariance for round profiles") {
  Rng rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    SweepPrimitive p = test::random_primitive(rng);
    p.profile.b = p.profile.a;
    p.profile.d = 2.0;
    const Mat3 rot = Eigen::AngleAxisd(rng.uniform(0, 6.28), Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized()).toRotationMatrix();
    const Vec3 shift(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
    SweepPrimitive moved = p;
    std::vector<Vec3> ctrl = p.axis.control_points();
    for (Vec3& c : ctrl) c = rot * c + shift;
    moved.axis = SweepAxis(ctrl);
    const SoftField f(p), fm(moved);
    for (int i = 0; i < 50; ++i) {
      const Vec3 q = p.axis.point(rng.uniform()) + 0.4 * Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      CHECK(std::abs(fm.value(rot * q + shift) - f.value(q)) < 1e-9);
    }
  }
}

TEST_CASE("Boltzmann union") {
  for (double alpha : {0.0, 1.0, 40.0, 1000.0}) {
    const std::vector<double> one = {0.37};
    CHECK(union_boltzmann(one, alpha) == 0.37);
    const std::vector<double> same = {0.6, 0.6, 0.6};
    CHECK(union_boltzmann(same, alpha) == Approx(0.6).epsilon(1e-15));
  }
  const std::vector<double> pair = {0.0, 1.0};
  CHECK(std::abs(union_boltzmann(pair, 40.0) - 1.0) < 1e-6);
  CHECK(union_boltzmann(pair, 40.0) == Approx(1.0 - 1.0 / (1.0 + std::exp(40.0))).epsilon(1e-15));
  const std::vector<double> huge = {0.2, 0.9, 0.5};
  CHECK(std::isfinite(union_boltzmann(huge, 1e6)));
  // Gradient against central differences.
  const std::vector<double> v = {0.1, 0.8, 0.45, 0.3};
  const auto g = union_boltzmann_gradient(v, 40.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto vp = v, vm = v;
    vp[i] += 1e-7;
    vm[i] -= 1e-7;
    CHECK(g[i] == Approx((union_boltzmann(vp, 40.0) - union_boltzmann(vm, 40.0)) / 2e-7).epsilon(1e-6));
  }
}
