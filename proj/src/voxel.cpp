#include "sweep/voxel.hpp"

#include "sweep/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

namespace sweep {

namespace {
constexpr char kMagic[8] = {'S', 'W', 'E', 'E', 'P', 'V', 'O', 'X'};
// Guards allocation on corrupt headers: 1024^3 bytes.
constexpr std::uint32_t kMaxResolution = 1024;
}  // namespace

VoxelGrid::VoxelGrid(int resolution) : r_(resolution) {
  if (resolution < 1) throw DomainError("voxel resolution must be positive, got " + std::to_string(resolution));
  cells_.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);
}

Vec3 VoxelGrid::center(int i, int j, int k) const {
  const double h = spacing();
  return {-0.5 + (i + 0.5) * h, -0.5 + (j + 0.5) * h, -0.5 + (k + 0.5) * h};
}

Vec3 VoxelGrid::center(std::size_t flat) const {
  const auto r = static_cast<std::size_t>(r_);
  return center(static_cast<int>(flat % r), static_cast<int>((flat / r) % r), static_cast<int>(flat / (r * r)));
}

bool VoxelGrid::cell_of(const Vec3& p, int& i, int& j, int& k) const {
  int idx[3];
  for (int c = 0; c < 3; ++c) {
    const double x = (p[c] + 0.5) * r_;
    if (!(x >= 0.0) || x > r_) return false;
    idx[c] = std::min(static_cast<int>(x), r_ - 1);
  }
  i = idx[0];
  j = idx[1];
  k = idx[2];
  return true;
}

bool VoxelGrid::contains(const Vec3& p) const {
  int i, j, k;
  return cell_of(p, i, j, k) && at(i, j, k);
}

std::size_t VoxelGrid::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

VoxelGrid rasterize(int resolution, const std::function<bool(const Vec3&)>& inside) {
  VoxelGrid grid(resolution);
  for (int k = 0; k < resolution; ++k) {
    for (int j = 0; j < resolution; ++j) {
      for (int i = 0; i < resolution; ++i) grid.set(i, j, k, inside(grid.center(i, j, k)));
    }
  }
  return grid;
}

void write_sweepvox(std::ostream& out, const VoxelGrid& grid) {
  out.write(kMagic, sizeof kMagic);
  const auto r = static_cast<std::uint32_t>(grid.resolution());
  const std::array<char, 4> le = {static_cast<char>(r & 0xff), static_cast<char>((r >> 8) & 0xff),
                                  static_cast<char>((r >> 16) & 0xff), static_cast<char>((r >> 24) & 0xff)};
  out.write(le.data(), le.size());
  out.write(reinterpret_cast<const char*>(grid.cells().data()), static_cast<std::streamsize>(grid.size()));
}

void write_sweepvox_file(const std::string& path, const VoxelGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  write_sweepvox(out, grid);
  if (!out) throw FormatError("failed writing " + path);
}

VoxelGrid read_sweepvox(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw FormatError("not a SWEEPVOX file: bad magic");
  }
  unsigned char le[4];
  if (!in.read(reinterpret_cast<char*>(le), 4)) throw FormatError("SWEEPVOX header truncated");
  const std::uint32_t r = le[0] | (le[1] << 8) | (le[2] << 16) | (static_cast<std::uint32_t>(le[3]) << 24);
  if (r == 0 || r > kMaxResolution) throw FormatError("SWEEPVOX resolution out of range: " + std::to_string(r));
  VoxelGrid grid(static_cast<int>(r));
  auto& cells = grid.cells();
  if (!in.read(reinterpret_cast<char*>(cells.data()), static_cast<std::streamsize>(cells.size()))) {
    throw FormatError("SWEEPVOX payload truncated: expected " + std::to_string(cells.size()) + " bytes");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] > 1) {
      throw FormatError("SWEEPVOX byte " + std::to_string(12 + i) + " has value " + std::to_string(cells[i]) +
                        "; cells must be 0 or 1");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("SWEEPVOX has trailing bytes");
  return grid;
}

VoxelGrid read_sweepvox_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open voxel file " + path);
  return read_sweepvox(in);
}

}  // namespace sweep
