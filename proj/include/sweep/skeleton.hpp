#pragma once

#include "sweep/assembly.hpp"
#include "sweep/voxel.hpp"

#include <cstdint>
#include <vector>

namespace sweep {

/// Medial-axis samples with their distance to the boundary.
struct SkeletonPoints {
  PointList points;
  std::vector<double> radii;
};

/// Squared distance, in squared cell units, from every occupied cell
/// center to the nearest unoccupied one; cells outside the lattice count as
/// unoccupied. Zero on unoccupied cells.
std::vector<std::int64_t> squared_distance_cells(const VoxelGrid& grid);

/// The same distance in cube units.
std::vector<double> distance_transform(const VoxelGrid& grid);

inline constexpr double kDefaultPruneRatio = 0.3;
inline constexpr std::size_t kDefaultSkeletonCap = 4096;

/// Cells whose distance is >= every 26-neighbour's and >= prune_ratio times
/// the maximum. More than max_points survivors are thinned by a fixed
/// stride (max_points = 0 keeps all). Throws DomainError on an empty grid.
SkeletonPoints extract_medial_axis(const VoxelGrid& grid, double prune_ratio = kDefaultPruneRatio,
                                   std::size_t max_points = kDefaultSkeletonCap);

/// Warm start: K clusters by farthest-point seeding from a seeded start
/// and nearest-centre assignment, then per cluster a principal-direction
/// segment extended by the median radius at both ends, n control points
/// spread uniformly on it, a = b = median radius, d = 2, constant scaling
/// and gate 0.5.
Assembly initialize_primitives(const SkeletonPoints& skeleton, int K, std::uint64_t seed, int n = 3, int k = 2);

}  // namespace sweep
