#pragma once

#include "sweep/geometry.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sweep {

/// Binary occupancy on an R^3 lattice over [-0.5, 0.5]^3, x fastest.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(int resolution);

  int resolution() const { return r_; }
  double spacing() const { return 1.0 / r_; }
  std::size_t size() const { return cells_.size(); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(r_) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(r_) * static_cast<std::size_t>(k));
  }
  bool in_range(int i, int j, int k) const { return i >= 0 && j >= 0 && k >= 0 && i < r_ && j < r_ && k < r_; }
  bool at(int i, int j, int k) const { return cells_[index(i, j, k)] != 0; }
  /// False outside the lattice.
  bool occupied(int i, int j, int k) const { return in_range(i, j, k) && at(i, j, k); }
  void set(int i, int j, int k, bool value) { cells_[index(i, j, k)] = value ? 1 : 0; }

  Vec3 center(int i, int j, int k) const;
  Vec3 center(std::size_t flat) const;
  /// Cell containing p; false when p lies outside the cube.
  bool cell_of(const Vec3& p, int& i, int& j, int& k) const;
  /// Occupancy of the cell containing p (0 outside the cube).
  bool contains(const Vec3& p) const;

  std::size_t count() const;
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::vector<std::uint8_t>& cells() { return cells_; }

  bool operator==(const VoxelGrid& other) const = default;

 private:
  int r_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Occupied wherever `inside` holds at the cell center.
VoxelGrid rasterize(int resolution, const std::function<bool(const Vec3&)>& inside);

/// SWEEPVOX: "SWEEPVOX", little-endian u32 R, R^3 bytes of 0 or 1.
void write_sweepvox(std::ostream& out, const VoxelGrid& grid);
void write_sweepvox_file(const std::string& path, const VoxelGrid& grid);
VoxelGrid read_sweepvox(std::istream& in);
VoxelGrid read_sweepvox_file(const std::string& path);

}  // namespace sweep
