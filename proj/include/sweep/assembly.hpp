#pragma once

#include "sweep/primitive.hpp"

#include <vector>

namespace sweep {

/// K primitives with selection gates in [0, 1].
struct Assembly {
  std::vector<SweepPrimitive> primitives;
  std::vector<double> gates;

  int K() const { return static_cast<int>(primitives.size()); }
  /// Number of gates above the threshold.
  int selected_count(double threshold = 0.5) const;
  /// Indices of gates above the threshold, ascending.
  std::vector<int> selected(double threshold = 0.5) const;
};

/// Throws DimensionError when gates and primitives disagree in count or
/// the primitives disagree in n or k.
void check_assembly(const Assembly& assembly);

}  // namespace sweep
