#pragma once

#include "sweep/assembly.hpp"
#include "sweep/field.hpp"
#include "sweep/skeleton.hpp"
#include "sweep/voxel.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sweep {

enum class OverlapMode { hinge, paper_literal };

std::string to_string(OverlapMode mode);
/// "hinge", or "paper" / "paper_literal"; throws DomainError otherwise.
OverlapMode parse_overlap_mode(const std::string& text);

struct FitConfig {
  int K = 8;
  int n = 3;  // control points per axis
  int k = 2;  // scaling degree
  int iterations = 2000;
  double lambda1 = 12.0;
  double alpha = 40.0;
  double lambda2 = 6.0;
  double beta = 0.8 * 8;  // threshold of OverlapMode::paper_literal, 0.8 K
  double beta_eff = 1.2;  // hinge overlap threshold
  double lambda3 = 0.3;   // 0.3 K / 8
  double lambda4 = 5.0;   // initial axis weight
  double lambda4_decay = 0.999;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  int test_cells = 8192;
  int surface_points = 2048;
  double surface_band_cells = 2.0;
  OverlapMode overlap_mode = OverlapMode::hinge;
  double gate_threshold = 0.5;
  double axis_gate_min = 0.05;
  int axis_samples = 64;
  double prune_ratio = kDefaultPruneRatio;
  std::size_t skeleton_cap = kDefaultSkeletonCap;
  FieldConfig field;
  /// Ablation: intermediate control points stay on the chord between the
  /// end points, so every axis is a straight extrusion.
  bool straight_axis = false;
  int threads = 1;

  /// Defaults with the K-dependent weights beta = 0.8 K and lambda3 = 0.3 K / 8.
  static FitConfig defaults(int K = 8);
};

/// Throws DomainError for negative weights, K < 1 or iterations < 1.
void check_config(const FitConfig& config);

struct TestPointSet {
  PointList points;
  std::vector<double> labels;  // ground-truth occupancy, 0 or 1
};

/// Stratified cell centres (half occupied, half empty where possible) plus
/// points jittered within surface_band_cells of boundary cells, labelled by
/// their containing cell.
TestPointSet make_test_points(const VoxelGrid& grid, const FitConfig& config, std::uint64_t seed);

struct LossBreakdown {
  double total = 0.0;
  double recon = 0.0;
  double overlap = 0.0;
  double parsimony = 0.0;
  double axis = 0.0;
  double lambda4 = 0.0;  // axis weight at the evaluated iteration
  bool axis_fallback = false;
};

/// Per-point soft occupancies, row-major points x K.
std::vector<double> primitive_occupancies(const Assembly& assembly, const PointList& points,
                                          const FieldConfig& field, int threads = 1);

/// Boltzmann union of gated values at every point.
std::vector<double> assembled_field(const Assembly& assembly, const std::vector<double>& occupancies,
                                    std::size_t points, double alpha);

double loss_recon(const Assembly& assembly, const TestPointSet& tps, const FitConfig& config);
double loss_overlap(const Assembly& assembly, const TestPointSet& tps, const FitConfig& config);
double loss_parsimony(const Assembly& assembly);
/// Mean over skeleton points of the distance to the nearest axis sample of
/// the primitives whose gate exceeds axis_gate_min; all primitives when none
/// does (with a warning).
double loss_axis(const Assembly& assembly, const SkeletonPoints& skeleton, int axis_samples,
                 double gate_min = 0.05);

/// Component values from precomputed per-point occupancies.
double recon_from(const std::vector<double>& gates, const std::vector<double>& occupancies,
                  const std::vector<double>& labels, double alpha);
double overlap_from(const std::vector<double>& gates, const std::vector<double>& occupancies, std::size_t points,
                    const FitConfig& config);

/// Weighted sum of the four terms with lambda4 decayed to `iteration`.
LossBreakdown combine_losses(double recon, double overlap, double parsimony, double axis, const FitConfig& config,
                             int iteration = 0);
LossBreakdown loss_total(const Assembly& assembly, const TestPointSet& tps, const SkeletonPoints& skeleton,
                         const FitConfig& config, int iteration = 0);

/// Flat optimizer vector: every primitive's reparameterized parameters,
/// then the gate logits.
std::vector<double> encode_assembly(const Assembly& assembly);
Assembly decode_assembly(std::span<const double> flat, int K, int n, int k);

/// Loss at a flat vector and its exact gradient with respect to it. With
/// straight_axis the intermediate control points are tied to the chord and
/// their gradient is folded into the end points (their own entries read 0).
LossBreakdown loss_and_gradient(std::span<const double> flat, const TestPointSet& tps,
                                const SkeletonPoints& skeleton, const FitConfig& config, int iteration,
                                std::span<double> gradient);

/// Replaces intermediate control points by their chord positions.
void straighten_axis(SweepPrimitive& primitive);

}  // namespace sweep
