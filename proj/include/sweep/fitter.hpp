#pragma once

#include "sweep/losses.hpp"

#include <functional>
#include <vector>

namespace sweep {

struct TraceRecord {
  int iter = 0;
  double total = 0.0;
  double recon = 0.0;
  double overlap = 0.0;
  double parsimony = 0.0;
  double axis = 0.0;
  double q_soft = 0.0;  // sum of gates
};

struct FitResult {
  /// All K primitives; gates hard-thresholded to 0 or 1 with at least one 1.
  Assembly assembly;
  std::vector<double> soft_gates;
  std::vector<TraceRecord> trace;
  SkeletonPoints skeleton;
};

/// Called after every iteration with the record and the current (soft)
/// assembly.
using FitObserver = std::function<void(const TraceRecord&, const Assembly&)>;

/// Skeleton, warm start, then Adam on the reparameterized parameters and
/// gate logits against loss_total. Throws DivergenceError naming the first
/// non-finite loss term.
FitResult fit(const VoxelGrid& grid, const FitConfig& config, const FitObserver& observer = {});

/// Same loop from a given starting assembly.
FitResult fit_from(const Assembly& start, const VoxelGrid& grid, const SkeletonPoints& skeleton,
                   const FitConfig& config, const FitObserver& observer = {});

/// Drops primitives with gate <= threshold and sets the survivors' gates to
/// 1; keeps the largest gate (first on ties) when none passes.
Assembly select_primitives(const Assembly& assembly, double threshold = 0.5);

}  // namespace sweep
