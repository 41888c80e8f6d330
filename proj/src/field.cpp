#include "sweep/field.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sweep {

namespace {

using Jet = Eigen::AutoDiffScalar<Eigen::VectorXd>;

template <class Scalar>
struct SlabGeometry {
  std::vector<FrameT<Scalar>> frames;
  std::vector<double> spacing;  // larger gap to a neighbouring origin
  Scalar kappa;
};

template <class Scalar>
SlabGeometry<Scalar> slab_geometry(std::span<const Vec3T<Scalar>> ctrl, std::span<const double> knots,
                                   const FieldConfig& config) {
  using std::sqrt;
  const int m = config.frames;
  SlabGeometry<Scalar> g;
  g.frames = transport_frames<Scalar>(ctrl, knots, m);
  g.spacing.assign(static_cast<std::size_t>(m), 0.0);
  Scalar total(0.0);
  for (int i = 0; i + 1 < m; ++i) {
    const Vec3T<Scalar> diff = g.frames[i + 1].origin - g.frames[i].origin;
    const Scalar gap = sqrt(diff.dot(diff));
    g.spacing[i] = std::max(g.spacing[i], value_of(gap));
    g.spacing[i + 1] = value_of(gap);
    total += gap;
  }
  const Scalar mean = total / static_cast<double>(m - 1);
  if (!(value_of(mean) > 0.0)) throw InvalidPrimitive("sweep axis has zero length");
  const Scalar extra = config.slab_resolution / mean;
  g.kappa = sqrt(config.sharpness * config.sharpness + extra * extra);
  return g;
}

void split_jet(const Vec3T<Jet>& v, Vec3& value, Eigen::Matrix<double, 3, Eigen::Dynamic>& jac, int cols) {
  jac.setZero(3, cols);
  for (int c = 0; c < 3; ++c) {
    value[c] = v[c].value();
    if (v[c].derivatives().size() == cols) jac.row(c) = v[c].derivatives().transpose();
  }
}

Eigen::RowVectorXd jet_row(const Jet& j, int cols) {
  if (j.derivatives().size() == cols) return j.derivatives().transpose();
  return Eigen::RowVectorXd::Zero(cols);
}

}  // namespace

SoftField::SoftField(const SweepPrimitive& primitive, const FieldConfig& config, bool with_gradient)
    : layout_{primitive.n(), primitive.k()},
      profile_(primitive.profile),
      profile_sharpness_(config.profile_sharpness),
      hyp_(std::hypot(primitive.profile.a, primitive.profile.b)) {
  if (config.frames < 2) throw DomainError("soft occupancy needs at least 2 frames");
  if (!(config.sharpness > 0.0) || !(config.profile_sharpness > 0.0)) {
    throw DomainError("field sharpness must be positive");
  }
  const int m = config.frames;
  const auto& knots = primitive.axis.knots();
  slabs_.resize(static_cast<std::size_t>(m));
  std::vector<double> spacing;

  auto fill_scale = [&](int i) {
    const double t = static_cast<double>(i) / static_cast<double>(m - 1);
    slabs_[i].scale = scale_guard(primitive.scaling.raw(t));
  };

  if (!with_gradient) {
    const auto g = slab_geometry<double>(std::span<const Vec3>(primitive.axis.control_points()), knots, config);
    for (int i = 0; i < m; ++i) {
      Slab& s = slabs_[i];
      s.origin = g.frames[i].origin;
      s.tangent = g.frames[i].tangent;
      s.normal = g.frames[i].normal;
      s.binormal = g.frames[i].binormal;
      fill_scale(i);
    }
    slab_kappa_ = g.kappa;
    spacing = g.spacing;
  } else {
    const int cols = 3 * primitive.n();
    std::vector<Vec3T<Jet>> ctrl(primitive.axis.size());
    for (std::size_t i = 0; i < ctrl.size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        ctrl[i][c] = Jet(primitive.axis.control_points()[i][c], cols, static_cast<int>(3 * i) + c);
      }
    }
    const auto g = slab_geometry<Jet>(std::span<const Vec3T<Jet>>(ctrl), knots, config);
    jets_.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      Slab& s = slabs_[i];
      SlabJet& j = jets_[i];
      split_jet(g.frames[i].origin, s.origin, j.d_origin, cols);
      split_jet(g.frames[i].tangent, s.tangent, j.d_tangent, cols);
      split_jet(g.frames[i].normal, s.normal, j.d_normal, cols);
      split_jet(g.frames[i].binormal, s.binormal, j.d_binormal, cols);
      fill_scale(i);
      const double t = static_cast<double>(i) / static_cast<double>(m - 1);
      const double guard = scale_guard_derivative(primitive.scaling.raw(t));
      j.d_scale.resize(primitive.scaling.coeffs.size());
      for (std::size_t c = 0; c < j.d_scale.size(); ++c) j.d_scale[c] = guard * primitive.scaling.coeff_weight(c, t);
    }
    slab_kappa_ = g.kappa.value();
    d_slab_kappa_ = jet_row(g.kappa, cols);
    spacing = g.spacing;
  }

  // A wedge may open up to about twice the lateral radius past a fold, so
  // the reach is deliberately loose; the plane tests reject cheaply.
  support_.setEmpty();
  for (int i = 0; i < m; ++i) {
    Slab& s = slabs_[i];
    s.lower = std::max(i - 1, 0);
    s.upper = std::min(i + 1, m - 1);
    const double lateral = hyp_ * s.scale + kFieldCutoff / profile_sharpness_;
    s.reach = 2.0 * lateral + spacing[i] + kFieldCutoff / slab_kappa_;
    support_.extend(s.origin - Vec3::Constant(s.reach));
    support_.extend(s.origin + Vec3::Constant(s.reach));
  }
}

double SoftField::value(const Vec3& query) const { return evaluate<false>(query, {}); }

double SoftField::value_and_gradient(const Vec3& query, std::span<double> gradient) const {
  if (jets_.empty()) throw Error("SoftField was built without gradient support");
  if (gradient.size() != layout_.size()) {
    throw DimensionError("gradient buffer has " + std::to_string(gradient.size()) + " entries, expected " +
                         std::to_string(layout_.size()));
  }
  return evaluate<true>(query, gradient);
}

template <bool kGradient>
double SoftField::evaluate(const Vec3& query, std::span<double> gradient) const {
  if constexpr (kGradient) std::fill(gradient.begin(), gradient.end(), 0.0);
  if (!support_.contains(query)) return 0.0;

  struct Active {
    int frame;
    double mu;
    Vec3 offset;
    // partials of mu by the signed plane distances, profile-plane
    // coordinates, slab sharpness and profile parameters
    double mu_lower, mu_upper, mu_u, mu_v, mu_kappa, mu_a, mu_b, mu_d, mu_s;
  };
  thread_local std::vector<Active> active;
  active.clear();

  const double a = profile_.a, b = profile_.b, d = profile_.d;
  const double ks = slab_kappa_, kp = profile_sharpness_;
  constexpr double kNegligible = 1e-14;
  double keep = 1.0;

  for (std::size_t i = 0; i < slabs_.size(); ++i) {
    const Slab& sl = slabs_[i];
    const Vec3 offset = query - sl.origin;
    if (offset.squaredNorm() > sl.reach * sl.reach) continue;
    const Slab& lo = slabs_[sl.lower];
    const Slab& hi = slabs_[sl.upper];
    const double w_lower = (query - lo.origin).dot(lo.tangent);
    const double w_upper = (query - hi.origin).dot(hi.tangent);
    const double sa = sigmoid(ks * w_lower), sb = sigmoid(ks * w_upper);
    // Soft exclusive-or: past the lower plane but not the upper one, or the
    // reverse where the planes have crossed inside a fold.
    const double wedge = sa * (1.0 - sb) + (1.0 - sa) * sb;
    if (wedge < kNegligible) continue;
    const double u = offset.dot(sl.normal);
    const double v = offset.dot(sl.binormal);
    const double s = sl.scale;
    const double ea = a * s, eb = b * s, cs = s * hyp_;
    const double pu = std::abs(u) / ea, pv = std::abs(v) / eb;
    if (kp * cs * (1.0 - std::max(pu, pv)) < -kFieldCutoff) continue;
    const double P = pu > 0.0 ? std::pow(pu, d) : 0.0;
    const double Q = pv > 0.0 ? std::pow(pv, d) : 0.0;
    const double g = P + Q;
    const double r = g > 0.0 ? std::pow(g, 1.0 / d) : 0.0;
    const double s3 = sigmoid(kp * cs * (1.0 - r));
    const double mu = wedge * s3;
    keep *= 1.0 - mu;
    if constexpr (!kGradient) continue;

    Active act{};
    act.frame = static_cast<int>(i);
    act.mu = mu;
    act.offset = offset;
    const double mu_sa = s3 * (1.0 - 2.0 * sb) * sa * (1.0 - sa);
    const double mu_sb = s3 * (1.0 - 2.0 * sa) * sb * (1.0 - sb);
    act.mu_lower = ks * mu_sa;
    act.mu_upper = ks * mu_sb;
    act.mu_kappa = mu_sa * w_lower + mu_sb * w_upper;
    const double c3 = mu * (1.0 - s3);
    const double mu_r = -c3 * kp * cs;
    const double mu_cs = c3 * kp * (1.0 - r);
    double ru = 0.0, rv = 0.0, ra = 0.0, rb = 0.0, rd = 0.0;
    if (g > 0.0) {
      if (u != 0.0) ru = r * P / (g * u);
      if (v != 0.0) rv = r * Q / (g * v);
      ra = -r * P / (g * ea);
      rb = -r * Q / (g * eb);
      const double plog = pu > 0.0 ? P * std::log(pu) : 0.0;
      const double qlog = pv > 0.0 ? Q * std::log(pv) : 0.0;
      rd = r * (-std::log(g) / (d * d) + (plog + qlog) / (d * g));
    }
    act.mu_u = mu_r * ru;
    act.mu_v = mu_r * rv;
    act.mu_a = mu_r * ra * s + mu_cs * s * a / hyp_;
    act.mu_b = mu_r * rb * s + mu_cs * s * b / hyp_;
    act.mu_d = mu_r * rd;
    act.mu_s = mu_r * (ra * a + rb * b) + mu_cs * hyp_;
    active.push_back(act);
  }
  const double value = 1.0 - keep;
  if constexpr (!kGradient) {
    return value;
  } else {
    // Weight of each membership in the union: product of the other (1 - mu).
    thread_local std::vector<double> prefix;
    prefix.assign(active.size() + 1, 1.0);
    for (std::size_t i = 0; i < active.size(); ++i) prefix[i + 1] = prefix[i] * (1.0 - active[i].mu);
    const int cols = 3 * layout_.n;
    Eigen::Map<Eigen::VectorXd> g_ctrl(gradient.data(), cols);
    double suffix = 1.0;
    for (std::size_t idx = active.size(); idx-- > 0;) {
      const Active& act = active[idx];
      const double weight = prefix[idx] * suffix;
      suffix *= 1.0 - act.mu;
      if (weight == 0.0) continue;
      const Slab& sl = slabs_[act.frame];
      const SlabJet& jet = jets_[act.frame];
      // profile-plane coordinates u = (q - o) . N, v = (q - o) . B
      const double wu = weight * act.mu_u, wv = weight * act.mu_v;
      g_ctrl.noalias() -= jet.d_origin.transpose() * (wu * sl.normal + wv * sl.binormal);
      g_ctrl.noalias() += jet.d_normal.transpose() * (wu * act.offset);
      g_ctrl.noalias() += jet.d_binormal.transpose() * (wv * act.offset);
      // bounding planes w = (q - o_j) . T_j of the neighbouring frames
      const auto plane = [&](int j, double coeff) {
        if (coeff == 0.0) return;
        const Slab& pl = slabs_[j];
        const SlabJet& pj = jets_[j];
        g_ctrl.noalias() -= pj.d_origin.transpose() * (coeff * pl.tangent);
        g_ctrl.noalias() += pj.d_tangent.transpose() * (coeff * (act.offset + (sl.origin - pl.origin)));
      };
      plane(sl.lower, weight * act.mu_lower);
      plane(sl.upper, weight * act.mu_upper);
      g_ctrl.noalias() += (weight * act.mu_kappa) * d_slab_kappa_.transpose();
      gradient[layout_.a()] += weight * act.mu_a;
      gradient[layout_.b()] += weight * act.mu_b;
      gradient[layout_.d()] += weight * act.mu_d;
      for (std::size_t c = 0; c < jet.d_scale.size(); ++c) {
        gradient[layout_.scale(static_cast<int>(c))] += weight * act.mu_s * jet.d_scale[c];
      }
    }
    return value;
  }
}

template double SoftField::evaluate<false>(const Vec3&, std::span<double>) const;
template double SoftField::evaluate<true>(const Vec3&, std::span<double>) const;

double soft_occupancy(const SweepPrimitive& primitive, const Vec3& query, const FieldConfig& config) {
  return SoftField(primitive, config).value(query);
}

OracleSweep::OracleSweep(const SweepPrimitive& primitive, int dense_frames) : degree_(primitive.profile.d) {
  if (dense_frames < 64) {
    throw DomainError("oracle occupancy needs at least 64 dense frames, got " + std::to_string(dense_frames));
  }
  const auto frames = parallel_transport_frames(primitive.axis, dense_frames);
  const int m = dense_frames;
  std::vector<double> gap(static_cast<std::size_t>(m - 1));
  for (int i = 0; i + 1 < m; ++i) gap[i] = (frames[i + 1].origin - frames[i].origin).norm();
  disks_.resize(static_cast<std::size_t>(m));
  support_.setEmpty();
  for (int i = 0; i < m; ++i) {
    Disk& dk = disks_[i];
    dk.origin = frames[i].origin;
    dk.tangent = frames[i].tangent;
    dk.normal = frames[i].normal;
    dk.binormal = frames[i].binormal;
    const double prev = i > 0 ? gap[i - 1] : 0.0;
    const double next = i + 1 < m ? gap[i] : 0.0;
    dk.half_width = 0.5 * std::max(prev, next);
    const double s = scaling_value(primitive.scaling, static_cast<double>(i) / static_cast<double>(m - 1));
    dk.a = primitive.profile.a * s;
    dk.b = primitive.profile.b * s;
    const double reach = std::hypot(dk.a, dk.b) + 2.0 * dk.half_width;
    reach_ = std::max(reach_, reach);
    support_.extend(dk.origin - Vec3::Constant(reach));
    support_.extend(dk.origin + Vec3::Constant(reach));
  }
}

bool OracleSweep::inside_disk(const Disk& dk, const Vec3& query) const {
  const Vec3 offset = query - dk.origin;
  if (std::abs(offset.dot(dk.tangent)) > dk.half_width) return false;
  const double pu = std::abs(offset.dot(dk.normal)) / dk.a;
  if (pu > 1.0) return false;
  const double pv = std::abs(offset.dot(dk.binormal)) / dk.b;
  if (pv > 1.0) return false;
  return std::pow(pu, degree_) + std::pow(pv, degree_) <= 1.0;
}

bool OracleSweep::inside_between(const Disk& lo, const Disk& hi, const Vec3& query) const {
  const double w0 = (query - lo.origin).dot(lo.tangent);
  const double w1 = (query - hi.origin).dot(hi.tangent);
  if ((w0 < 0.0 && w1 < 0.0) || (w0 > 0.0 && w1 > 0.0)) return false;
  const double lambda = w0 - w1 > 0.0 ? w0 / (w0 - w1) : 0.0;
  const Vec3 origin = lo.origin + lambda * (hi.origin - lo.origin);
  const Vec3 tangent = (lo.tangent + lambda * (hi.tangent - lo.tangent)).normalized();
  Vec3 normal = lo.normal + lambda * (hi.normal - lo.normal);
  normal = (normal - normal.dot(tangent) * tangent).normalized();
  const Vec3 binormal = tangent.cross(normal);
  const Vec3 offset = query - origin;
  const double pu = std::abs(offset.dot(normal)) / (lo.a + lambda * (hi.a - lo.a));
  if (pu > 1.0) return false;
  const double pv = std::abs(offset.dot(binormal)) / (lo.b + lambda * (hi.b - lo.b));
  if (pv > 1.0) return false;
  return std::pow(pu, degree_) + std::pow(pv, degree_) <= 1.0;
}

bool OracleSweep::contains(const Vec3& query) const {
  if (!support_.contains(query)) return false;
  const double reach2 = reach_ * reach_;
  for (std::size_t i = 0; i < disks_.size(); ++i) {
    if ((query - disks_[i].origin).squaredNorm() > reach2) continue;
    if (inside_disk(disks_[i], query)) return true;
    if (i + 1 < disks_.size() && inside_between(disks_[i], disks_[i + 1], query)) return true;
  }
  return false;
}

int oracle_occupancy(const SweepPrimitive& primitive, const Vec3& query, int dense_frames) {
  return OracleSweep(primitive, dense_frames).contains(query) ? 1 : 0;
}

double union_boltzmann(std::span<const double> values, double alpha) {
  if (values.empty()) throw DomainError("Boltzmann union of an empty list");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, alpha * v);
  double num = 0.0, den = 0.0;
  for (double v : values) {
    const double w = std::exp(alpha * v - top);
    num += v * w;
    den += w;
  }
  return num / den;
}

std::vector<double> union_boltzmann_gradient(std::span<const double> values, double alpha) {
  if (values.empty()) throw DomainError("Boltzmann union of an empty list");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, alpha * v);
  std::vector<double> w(values.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    w[i] = std::exp(alpha * values[i] - top);
    num += values[i] * w[i];
    den += w[i];
  }
  const double u = num / den;
  for (std::size_t i = 0; i < values.size(); ++i) w[i] = w[i] * (1.0 + alpha * (values[i] - u)) / den;
  return w;
}

Eigen::MatrixXd grad_params(const SweepPrimitive& primitive, std::span<const Vec3> queries,
                            const FieldConfig& config, double step) {
  const int n = primitive.n(), k = primitive.k();
  const std::vector<double> z = encode_params(pack_params(primitive), n, k);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(queries.size()), static_cast<Eigen::Index>(z.size()));
  auto field_at = [&](const std::vector<double>& zz) {
    return SoftField(unpack_params(decode_params(zz, n, k), n, k), config);
  };
  for (std::size_t j = 0; j < z.size(); ++j) {
    std::vector<double> zp = z, zm = z;
    zp[j] += step;
    zm[j] -= step;
    const SoftField fp = field_at(zp), fm = field_at(zm);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      out(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)) =
          (fp.value(queries[q]) - fm.value(queries[q])) / (2.0 * step);
    }
  }
  return out;
}

}  // namespace sweep
