#include "sweep/primitive.hpp"

#include "sweep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sweep {

std::size_t SweepPrimitive::param_count() const { return sweep::param_count(n(), k()); }

std::size_t param_count(int n, int k) { return static_cast<std::size_t>(3 * n + k + 3); }

std::vector<double> pack_params(const SweepPrimitive& primitive) {
  std::vector<double> out;
  out.reserve(primitive.param_count());
  for (const Vec3& c : primitive.axis.control_points()) {
    out.push_back(c.x());
    out.push_back(c.y());
    out.push_back(c.z());
  }
  out.push_back(primitive.profile.a);
  out.push_back(primitive.profile.b);
  out.push_back(primitive.profile.d);
  for (double f : primitive.scaling.coeffs) out.push_back(f);
  return out;
}

SweepPrimitive unpack_params(std::span<const double> values, int n, int k) {
  if (n < 3 || k < 0) {
    throw DimensionError("invalid primitive shape n = " + std::to_string(n) + ", k = " + std::to_string(k));
  }
  const std::size_t expected = param_count(n, k);
  if (values.size() != expected) {
    throw DimensionError("parameter vector length mismatch: expected " + std::to_string(expected) +
                         " (3n + k + 3 with n = " + std::to_string(n) + ", k = " + std::to_string(k) +
                         "), got " + std::to_string(values.size()));
  }
  std::vector<Vec3> ctrl(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ctrl[i] = Vec3(values[3 * i], values[3 * i + 1], values[3 * i + 2]);
  const ParamLayout layout{n, k};
  SweepPrimitive p;
  p.axis = SweepAxis(std::move(ctrl));
  p.profile = {values[layout.a()], values[layout.b()], values[layout.d()]};
  p.scaling.coeffs.assign(values.begin() + static_cast<std::ptrdiff_t>(layout.scale(0)), values.end());
  return p;
}

ParamRange param_range(std::size_t index, int n, int k) {
  const ParamLayout layout{n, k};
  if (index >= layout.size()) throw DimensionError("parameter index out of range: " + std::to_string(index));
  if (index < layout.a()) return bounds::control_point;
  if (index == layout.a() || index == layout.b()) return bounds::semi_axis;
  if (index == layout.d()) return bounds::degree;
  return bounds::scaling_coeff;
}

namespace {

std::string param_name(std::size_t index, int n, int k) {
  const ParamLayout layout{n, k};
  if (index < layout.a()) {
    static const char* coords = "xyz";
    return "control_points[" + std::to_string(index / 3) + "]." + coords[index % 3];
  }
  if (index == layout.a()) return "profile.a";
  if (index == layout.b()) return "profile.b";
  if (index == layout.d()) return "profile.d";
  return "scaling[" + std::to_string(index - layout.scale(0)) + "]";
}

}  // namespace

std::vector<std::string> bound_violations(const SweepPrimitive& primitive) {
  const std::vector<double> v = pack_params(primitive);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const ParamRange r = param_range(i, primitive.n(), primitive.k());
    if (!std::isfinite(v[i]) || !r.contains(v[i])) {
      std::ostringstream msg;
      msg << param_name(i, primitive.n(), primitive.k()) << " = " << v[i] << " not in [" << r.lo << ", "
          << r.hi << "]";
      out.push_back(msg.str());
    }
  }
  return out;
}

void validate_bounds(const SweepPrimitive& primitive) {
  const auto violations = bound_violations(primitive);
  if (violations.empty()) return;
  std::string msg = "parameter out of range:";
  for (const auto& v : violations) msg += " " + v + ";";
  msg.pop_back();
  throw BoundsError(msg);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double decode_bounded(double z, const ParamRange& range) { return range.lo + range.width() * sigmoid(z); }

double encode_bounded(double x, const ParamRange& range) {
  constexpr double margin = 1e-9;
  const double p = std::clamp((x - range.lo) / range.width(), margin, 1.0 - margin);
  return logit(p);
}

double decode_bounded_derivative(double z, const ParamRange& range) {
  const double s = sigmoid(z);
  return range.width() * s * (1.0 - s);
}

std::vector<double> encode_params(std::span<const double> packed, int n, int k) {
  std::vector<double> z(packed.size());
  for (std::size_t i = 0; i < packed.size(); ++i) z[i] = encode_bounded(packed[i], param_range(i, n, k));
  return z;
}

std::vector<double> decode_params(std::span<const double> unconstrained, int n, int k) {
  std::vector<double> x(unconstrained.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = decode_bounded(unconstrained[i], param_range(i, n, k));
  return x;
}

std::vector<double> decode_jacobian(std::span<const double> unconstrained, int n, int k) {
  std::vector<double> j(unconstrained.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    j[i] = decode_bounded_derivative(unconstrained[i], param_range(i, n, k));
  }
  return j;
}

}  // namespace sweep
