#include "sweep/assembly.hpp"

#include "sweep/errors.hpp"

namespace sweep {

int Assembly::selected_count(double threshold) const { return static_cast<int>(selected(threshold).size()); }

std::vector<int> Assembly::selected(double threshold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (gates[i] > threshold) out.push_back(static_cast<int>(i));
  }
  return out;
}

void check_assembly(const Assembly& assembly) {
  if (assembly.gates.size() != assembly.primitives.size()) {
    throw DimensionError("assembly has " + std::to_string(assembly.primitives.size()) + " primitives but " +
                         std::to_string(assembly.gates.size()) + " gates");
  }
  for (const auto& p : assembly.primitives) {
    if (p.n() != assembly.primitives.front().n() || p.k() != assembly.primitives.front().k()) {
      throw DimensionError("assembly primitives must share n and k");
    }
  }
}

}  // namespace sweep
