#pragma once

#include "sweep/primitive.hpp"
#include "sweep/random.hpp"

#include <filesystem>
#include <string>

namespace sweep::test {

/// Primitive drawn uniformly from the admissible parameter box.
inline SweepPrimitive random_primitive(Rng& rng, int n = 3, int k = 2) {
  std::vector<Vec3> ctrl(static_cast<std::size_t>(n));
  for (Vec3& c : ctrl) {
    const double x = rng.uniform(-0.5, 0.5), y = rng.uniform(-0.5, 0.5), z = rng.uniform(-0.5, 0.5);
    c = Vec3(x, y, z);
  }
  SweepPrimitive p;
  p.axis = SweepAxis(std::move(ctrl));
  const double a = rng.uniform(0.01, 0.5), b = rng.uniform(0.01, 0.5), d = rng.uniform(0.3, 5.0);
  p.profile = {a, b, d};
  p.scaling.coeffs.resize(static_cast<std::size_t>(k));
  for (double& f : p.scaling.coeffs) f = rng.uniform(-0.5, 0.5);
  return p;
}

inline SweepPrimitive straight_primitive(const Vec3& from, const Vec3& to, double a, double b, double d) {
  SweepPrimitive p;
  p.axis = SweepAxis({from, 0.5 * (from + to), to});
  p.profile = {a, b, d};
  p.scaling.coeffs = {0.0, 0.0};
  return p;
}

/// Fresh scratch directory under the build tree.
inline std::string scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(SWEEP_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace sweep::test
