#include "sweep/fitter.hpp"

#include "sweep/errors.hpp"
#include "sweep/log.hpp"

#include <algorithm>
#include <cmath>

namespace sweep {

namespace {

void check_finite(const LossBreakdown& b, const FitConfig& c, int iter) {
  const std::pair<const char*, double> terms[] = {
      {"recon", b.recon}, {"overlap", b.overlap}, {"parsimony", b.parsimony}, {"axis", b.axis}};
  const double weights[] = {c.lambda1, c.lambda2, c.lambda3, b.lambda4};
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < 4; ++i) {
      const double value = pass == 0 ? terms[i].second : weights[i] * terms[i].second;
      if (!std::isfinite(value)) {
        throw DivergenceError(std::string(pass == 0 ? "loss term '" : "weighted loss term '") + terms[i].first +
                              "' became non-finite at iteration " + std::to_string(iter));
      }
    }
  }
  if (!std::isfinite(b.total)) throw DivergenceError("total loss became non-finite at iteration " + std::to_string(iter));
}

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

FitResult fit(const VoxelGrid& grid, const FitConfig& config, const FitObserver& observer) {
  check_config(config);
  if (grid.resolution() < 8) throw DomainError("voxel resolution must be at least 8 for fitting");
  if (grid.count() == 0) throw DomainError("cannot fit an empty shape");
  SkeletonPoints skeleton = extract_medial_axis(grid, config.prune_ratio, config.skeleton_cap);
  const Assembly start = initialize_primitives(skeleton, config.K, config.seed, config.n, config.k);
  return fit_from(start, grid, skeleton, config, observer);
}

FitResult fit_from(const Assembly& start, const VoxelGrid& grid, const SkeletonPoints& skeleton,
                   const FitConfig& config, const FitObserver& observer) {
  check_config(config);
  check_assembly(start);
  if (start.K() != config.K || start.primitives.front().n() != config.n || start.primitives.front().k() != config.k) {
    throw DimensionError("starting assembly does not match the configured K, n and k");
  }
  Assembly init = start;
  if (config.straight_axis) {
    for (auto& p : init.primitives) straighten_axis(p);
  }
  const TestPointSet tps = make_test_points(grid, config, config.seed);
  std::vector<double> x = encode_assembly(init);
  std::vector<double> grad(x.size()), m(x.size(), 0.0), v(x.size(), 0.0);

  FitResult result;
  result.skeleton = skeleton;
  result.trace.reserve(static_cast<std::size_t>(config.iterations));
  bool warned = false;
  double b1t = 1.0, b2t = 1.0;
  for (int iter = 0; iter < config.iterations; ++iter) {
    const LossBreakdown b = loss_and_gradient(x, tps, skeleton, config, iter, grad);
    check_finite(b, config, iter);
    for (double g : grad) {
      if (!std::isfinite(g)) throw DivergenceError("loss gradient became non-finite at iteration " + std::to_string(iter));
    }
    if (b.axis_fallback && !warned) {
      warn("no primitive has a gate above " + std::to_string(config.axis_gate_min) +
           "; axis loss uses all primitives");
      warned = true;
    }
    TraceRecord rec{iter, b.total, b.recon, b.overlap, b.parsimony, b.axis, 0.0};
    for (std::size_t i = x.size() - static_cast<std::size_t>(config.K); i < x.size(); ++i) rec.q_soft += sigmoid(x[i]);
    result.trace.push_back(rec);
    if (observer) {
      Assembly snapshot = decode_assembly(x, config.K, config.n, config.k);
      if (config.straight_axis) {
        for (auto& p : snapshot.primitives) straighten_axis(p);
      }
      observer(rec, snapshot);
    }
    b1t *= config.adam_beta1;
    b2t *= config.adam_beta2;
    for (std::size_t i = 0; i < x.size(); ++i) {
      m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * grad[i];
      v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * grad[i] * grad[i];
      const double mhat = m[i] / (1.0 - b1t);
      const double vhat = v[i] / (1.0 - b2t);
      x[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_epsilon);
    }
  }

  Assembly final_assembly = decode_assembly(x, config.K, config.n, config.k);
  if (config.straight_axis) {
    for (auto& p : final_assembly.primitives) straighten_axis(p);
  }
  result.soft_gates = final_assembly.gates;
  const int best = argmax(final_assembly.gates);
  for (double& g : final_assembly.gates) g = g > config.gate_threshold ? 1.0 : 0.0;
  final_assembly.gates[best] = 1.0;
  result.assembly = std::move(final_assembly);
  return result;
}

Assembly select_primitives(const Assembly& assembly, double threshold) {
  check_assembly(assembly);
  if (assembly.primitives.empty()) return assembly;
  Assembly out;
  for (int i = 0; i < assembly.K(); ++i) {
    if (assembly.gates[i] > threshold) {
      out.primitives.push_back(assembly.primitives[i]);
      out.gates.push_back(1.0);
    }
  }
  if (out.primitives.empty()) {
    out.primitives.push_back(assembly.primitives[argmax(assembly.gates)]);
    out.gates.push_back(1.0);
  }
  return out;
}

}  // namespace sweep
