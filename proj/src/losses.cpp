#include "sweep/losses.hpp"

#include "sweep/errors.hpp"
#include "sweep/log.hpp"
#include "sweep/parallel.hpp"
#include "sweep/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sweep {

std::string to_string(OverlapMode mode) { return mode == OverlapMode::hinge ? "hinge" : "paper_literal"; }

OverlapMode parse_overlap_mode(const std::string& text) {
  if (text == "hinge") return OverlapMode::hinge;
  if (text == "paper" || text == "paper_literal") return OverlapMode::paper_literal;
  throw DomainError("unknown overlap mode '" + text + "' (expected hinge or paper)");
}

FitConfig FitConfig::defaults(int K) {
  FitConfig c;
  c.K = K;
  c.beta = 0.8 * K;
  c.lambda3 = 0.3 * K / 8.0;
  return c;
}

void check_config(const FitConfig& c) {
  if (c.K < 1) throw DomainError("K must be at least 1, got " + std::to_string(c.K));
  if (c.iterations < 1) throw DomainError("iterations must be at least 1, got " + std::to_string(c.iterations));
  if (c.n < 3 || c.k < 0) throw DimensionError("invalid primitive shape n = " + std::to_string(c.n));
  const double weights[] = {c.lambda1, c.lambda2, c.lambda3, c.lambda4};
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("loss weights must be non-negative");
  }
  if (!(c.learning_rate > 0.0)) throw DomainError("learning rate must be positive");
  if (c.test_cells < 2 || c.surface_points < 0) throw DomainError("test-point counts out of range");
  if (c.axis_samples < 2) throw DomainError("need at least 2 axis samples per primitive");
}

TestPointSet make_test_points(const VoxelGrid& grid, const FitConfig& config, std::uint64_t seed) {
  std::vector<std::size_t> occupied, empty;
  for (std::size_t i = 0; i < grid.size(); ++i) (grid.cells()[i] ? occupied : empty).push_back(i);
  if (occupied.empty()) throw DomainError("cannot build test points for an empty shape");
  const std::size_t want = static_cast<std::size_t>(config.test_cells);
  std::size_t n_occ = std::min(want / 2, occupied.size());
  const std::size_t n_emp = std::min(want - n_occ, empty.size());
  n_occ = std::min(occupied.size(), want - n_emp);

  Rng rng(seed);
  auto choose = [&rng](std::vector<std::size_t>& pool, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
    std::vector<std::size_t> picked(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(picked.begin(), picked.end());
    return picked;
  };
  TestPointSet tps;
  for (std::size_t idx : choose(occupied, n_occ)) {
    tps.points.push_back(grid.center(idx));
    tps.labels.push_back(1.0);
  }
  for (std::size_t idx : choose(empty, n_emp)) {
    tps.points.push_back(grid.center(idx));
    tps.labels.push_back(0.0);
  }

  const int r = grid.resolution();
  std::vector<std::size_t> boundary;
  static const int kFace[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        const bool v = grid.at(i, j, k);
        for (const auto& f : kFace) {
          if (grid.occupied(i + f[0], j + f[1], k + f[2]) != v) {
            boundary.push_back(grid.index(i, j, k));
            break;
          }
        }
      }
    }
  }
  const double band = config.surface_band_cells * grid.spacing();
  for (int s = 0; s < config.surface_points && !boundary.empty(); ++s) {
    Vec3 p = grid.center(boundary[rng.index(boundary.size())]);
    for (int c = 0; c < 3; ++c) p[c] += rng.uniform(-band, band);
    tps.points.push_back(p);
    tps.labels.push_back(grid.contains(p) ? 1.0 : 0.0);
  }
  return tps;
}

std::vector<double> primitive_occupancies(const Assembly& assembly, const PointList& points,
                                          const FieldConfig& field, int threads) {
  std::vector<SoftField> fields;
  for (const auto& p : assembly.primitives) fields.emplace_back(p, field);
  const std::size_t K = fields.size();
  std::vector<double> out(points.size() * K);
  parallel_for(points.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      for (std::size_t i = 0; i < K; ++i) out[t * K + i] = fields[i].value(points[t]);
    }
  });
  return out;
}

std::vector<double> assembled_field(const Assembly& assembly, const std::vector<double>& occ, std::size_t points,
                                    double alpha) {
  const std::size_t K = assembly.gates.size();
  std::vector<double> out(points), v(K);
  for (std::size_t t = 0; t < points; ++t) {
    for (std::size_t i = 0; i < K; ++i) v[i] = assembly.gates[i] * occ[t * K + i];
    out[t] = union_boltzmann(v, alpha);
  }
  return out;
}

double recon_from(const std::vector<double>& gates, const std::vector<double>& occ,
                  const std::vector<double>& labels, double alpha) {
  if (labels.empty()) throw DomainError("reconstruction loss over an empty test set");
  const std::size_t K = gates.size();
  std::vector<double> v(K);
  double sum = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    for (std::size_t i = 0; i < K; ++i) v[i] = gates[i] * occ[t * K + i];
    const double e = union_boltzmann(v, alpha) - labels[t];
    sum += e * e;
  }
  return sum / static_cast<double>(labels.size());
}

double overlap_from(const std::vector<double>& gates, const std::vector<double>& occ, std::size_t points,
                    const FitConfig& config) {
  if (points == 0) throw DomainError("overlap loss over an empty test set");
  const std::size_t K = gates.size();
  double sum = 0.0;
  for (std::size_t t = 0; t < points; ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i < K; ++i) s += gates[i] * occ[t * K + i];
    sum += config.overlap_mode == OverlapMode::hinge ? std::max(s - config.beta_eff, 0.0) : std::min(s - config.beta, 0.0);
  }
  return sum / static_cast<double>(points);
}

double loss_recon(const Assembly& assembly, const TestPointSet& tps, const FitConfig& config) {
  check_assembly(assembly);
  const auto occ = primitive_occupancies(assembly, tps.points, config.field, config.threads);
  return recon_from(assembly.gates, occ, tps.labels, config.alpha);
}

double loss_overlap(const Assembly& assembly, const TestPointSet& tps, const FitConfig& config) {
  check_assembly(assembly);
  const auto occ = primitive_occupancies(assembly, tps.points, config.field, config.threads);
  return overlap_from(assembly.gates, occ, tps.points.size(), config);
}

double loss_parsimony(const Assembly& assembly) {
  double s = 0.0;
  for (double g : assembly.gates) s += g;
  return std::sqrt(s);
}

namespace {

struct AxisLoss {
  double value = 0.0;
  bool fallback = false;
};

// With ctrl_gradient non-null, accumulates d loss / d control point
// coordinate, laid out as K blocks of 3n.
AxisLoss axis_loss(const Assembly& assembly, const SkeletonPoints& skeleton, int samples, double gate_min,
                   std::vector<double>* ctrl_gradient) {
  if (skeleton.points.empty()) throw DomainError("axis loss needs a nonempty skeleton");
  if (samples < 2) throw DomainError("need at least 2 axis samples per primitive");
  AxisLoss out;
  std::vector<int> used;
  for (int i = 0; i < assembly.K(); ++i) {
    if (assembly.gates[i] > gate_min) used.push_back(i);
  }
  if (used.empty()) {
    out.fallback = true;
    for (int i = 0; i < assembly.K(); ++i) used.push_back(i);
  }
  struct Sample {
    int primitive;
    int index;
    Vec3 position;
  };
  const int n = assembly.primitives.front().n();
  std::vector<std::vector<double>> basis(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) basis[s] = bspline_basis(static_cast<std::size_t>(n), static_cast<double>(s) / (samples - 1));
  std::vector<Sample> pts;
  for (int i : used) {
    const SweepAxis& axis = assembly.primitives[i].axis;
    for (int s = 0; s < samples; ++s) pts.push_back({i, s, axis.point(static_cast<double>(s) / (samples - 1))});
  }
  const double inv = 1.0 / static_cast<double>(skeleton.points.size());
  double sum = 0.0;
  for (const Vec3& m : skeleton.points) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double d = (pts[j].position - m).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    const double dist = std::sqrt(best_d);
    sum += dist;
    if (ctrl_gradient && dist > 0.0) {
      const Sample& s = pts[best];
      const Vec3 dir = (s.position - m) * (inv / dist);
      for (int c = 0; c < n; ++c) {
        for (int a = 0; a < 3; ++a) (*ctrl_gradient)[static_cast<std::size_t>(s.primitive * 3 * n + 3 * c + a)] += basis[s.index][c] * dir[a];
      }
    }
  }
  out.value = sum * inv;
  return out;
}

}  // namespace

double loss_axis(const Assembly& assembly, const SkeletonPoints& skeleton, int axis_samples, double gate_min) {
  check_assembly(assembly);
  const AxisLoss a = axis_loss(assembly, skeleton, axis_samples, gate_min, nullptr);
  if (a.fallback) warn("no primitive has a gate above " + std::to_string(gate_min) + "; axis loss uses all primitives");
  return a.value;
}

LossBreakdown combine_losses(double recon, double overlap, double parsimony, double axis, const FitConfig& c,
                             int iteration) {
  LossBreakdown b;
  b.recon = recon;
  b.overlap = overlap;
  b.parsimony = parsimony;
  b.axis = axis;
  b.lambda4 = c.lambda4 * std::pow(c.lambda4_decay, iteration);
  b.total = c.lambda1 * recon + c.lambda2 * overlap + c.lambda3 * parsimony + b.lambda4 * axis;
  return b;
}

LossBreakdown loss_total(const Assembly& assembly, const TestPointSet& tps, const SkeletonPoints& skeleton,
                         const FitConfig& config, int iteration) {
  check_assembly(assembly);
  const auto occ = primitive_occupancies(assembly, tps.points, config.field, config.threads);
  const AxisLoss a = axis_loss(assembly, skeleton, config.axis_samples, config.axis_gate_min, nullptr);
  LossBreakdown b = combine_losses(recon_from(assembly.gates, occ, tps.labels, config.alpha),
                                   overlap_from(assembly.gates, occ, tps.points.size(), config),
                                   loss_parsimony(assembly), a.value, config, iteration);
  b.axis_fallback = a.fallback;
  return b;
}

std::vector<double> encode_assembly(const Assembly& assembly) {
  check_assembly(assembly);
  std::vector<double> flat;
  for (const auto& p : assembly.primitives) {
    const auto z = encode_params(pack_params(p), p.n(), p.k());
    flat.insert(flat.end(), z.begin(), z.end());
  }
  for (double g : assembly.gates) flat.push_back(encode_bounded(g, ParamRange{0.0, 1.0}));
  return flat;
}

Assembly decode_assembly(std::span<const double> flat, int K, int n, int k) {
  const std::size_t P = param_count(n, k);
  if (flat.size() != static_cast<std::size_t>(K) * (P + 1)) {
    throw DimensionError("assembly vector length mismatch: expected " + std::to_string(K * (P + 1)) + ", got " +
                         std::to_string(flat.size()));
  }
  Assembly out;
  for (int i = 0; i < K; ++i) {
    out.primitives.push_back(unpack_params(decode_params(flat.subspan(i * P, P), n, k), n, k));
  }
  for (int i = 0; i < K; ++i) out.gates.push_back(sigmoid(flat[K * P + i]));
  return out;
}

void straighten_axis(SweepPrimitive& primitive) {
  auto& ctrl = primitive.axis.mutable_control_points();
  const std::size_t n = ctrl.size();
  const Vec3 first = ctrl.front(), last = ctrl.back();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(n - 1);
    ctrl[j] = (1.0 - s) * first + s * last;
  }
}

LossBreakdown loss_and_gradient(std::span<const double> flat, const TestPointSet& tps,
                                const SkeletonPoints& skeleton, const FitConfig& config, int iteration,
                                std::span<double> gradient) {
  const int K = config.K, n = config.n;
  const std::size_t P = param_count(n, config.k);
  if (gradient.size() != flat.size()) throw DimensionError("gradient buffer does not match the parameter vector");
  const std::size_t T = tps.points.size();
  if (T == 0) throw DomainError("loss over an empty test set");
  Assembly assembly = decode_assembly(flat, K, n, config.k);
  if (config.straight_axis) {
    for (auto& p : assembly.primitives) straighten_axis(p);
  }

  std::vector<SoftField> fields;
  for (const auto& p : assembly.primitives) fields.emplace_back(p, config.field, true);
  std::vector<double> occ(T * K), docc(T * K * P);
  parallel_for(T, config.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      for (int i = 0; i < K; ++i) {
        occ[t * K + i] = fields[i].value_and_gradient(tps.points[t], std::span<double>(&docc[(t * K + i) * P], P));
      }
    }
  });

  const std::vector<double>& gates = assembly.gates;
  std::vector<double> gx(K * P, 0.0), dgate(K, 0.0), v(K);
  const double inv_t = 1.0 / static_cast<double>(T);
  double recon = 0.0, overlap = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double s = 0.0;
    for (int i = 0; i < K; ++i) {
      v[i] = gates[i] * occ[t * K + i];
      s += v[i];
    }
    const double u = union_boltzmann(v, config.alpha);
    const auto du = union_boltzmann_gradient(v, config.alpha);
    const double e = u - tps.labels[t];
    recon += e * e;
    const double coef_recon = config.lambda1 * 2.0 * e * inv_t;
    double coef_overlap = 0.0;
    if (config.overlap_mode == OverlapMode::hinge) {
      if (s > config.beta_eff) {
        overlap += s - config.beta_eff;
        coef_overlap = config.lambda2 * inv_t;
      }
    } else if (s < config.beta) {
      overlap += s - config.beta;
      coef_overlap = config.lambda2 * inv_t;
    }
    for (int i = 0; i < K; ++i) {
      const double dv = coef_recon * du[i] + coef_overlap;
      if (dv == 0.0) continue;
      dgate[i] += dv * occ[t * K + i];
      const double scale = dv * gates[i];
      const double* row = &docc[(t * K + i) * P];
      double* out = &gx[i * P];
      for (std::size_t j = 0; j < P; ++j) out[j] += scale * row[j];
    }
  }
  recon *= inv_t;
  overlap *= inv_t;

  const double parsimony = loss_parsimony(assembly);
  for (int i = 0; i < K; ++i) dgate[i] += config.lambda3 * 0.5 / parsimony;

  std::vector<double> daxis(static_cast<std::size_t>(K * 3 * n), 0.0);
  const AxisLoss axis = axis_loss(assembly, skeleton, config.axis_samples, config.axis_gate_min, &daxis);
  LossBreakdown b = combine_losses(recon, overlap, parsimony, axis.value, config, iteration);
  b.axis_fallback = axis.fallback;
  for (int i = 0; i < K; ++i) {
    for (int c = 0; c < 3 * n; ++c) gx[i * P + c] += b.lambda4 * daxis[i * 3 * n + c];
  }

  for (int i = 0; i < K; ++i) {
    double* g = &gx[i * P];
    if (config.straight_axis) {
      for (int j = 1; j + 1 < n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n - 1);
        for (int a = 0; a < 3; ++a) {
          g[a] += (1.0 - s) * g[3 * j + a];
          g[3 * (n - 1) + a] += s * g[3 * j + a];
          g[3 * j + a] = 0.0;
        }
      }
    }
    const auto jac = decode_jacobian(flat.subspan(i * P, P), n, config.k);
    for (std::size_t j = 0; j < P; ++j) gradient[i * P + j] = g[j] * jac[j];
  }
  for (int i = 0; i < K; ++i) gradient[K * P + i] = dgate[i] * gates[i] * (1.0 - gates[i]);
  return b;
}

}  // namespace sweep
