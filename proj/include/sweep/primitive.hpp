#pragma once

#include "sweep/axis.hpp"
#include "sweep/profile.hpp"
#include "sweep/scaling.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sweep {

/// A sweep surface: superellipse profile carried along a B-spline axis by
/// parallel-transport frames and rescaled by a polynomial.
struct SweepPrimitive {
  SuperellipseProfile profile;
  SweepAxis axis;
  ScalingPoly scaling;

  int n() const { return static_cast<int>(axis.size()); }
  int k() const { return scaling.degree(); }
  std::size_t param_count() const;
};

/// 3n + k + 3.
std::size_t param_count(int n, int k);

/// Flattened layout [c1 .. cn, a, b, d, f1 .. fk].
std::vector<double> pack_params(const SweepPrimitive& primitive);
SweepPrimitive unpack_params(std::span<const double> values, int n, int k);

/// Offsets into the packed vector.
struct ParamLayout {
  int n = 3;
  int k = 2;

  std::size_t control(int point, int coord) const { return static_cast<std::size_t>(3 * point + coord); }
  std::size_t a() const { return static_cast<std::size_t>(3 * n); }
  std::size_t b() const { return a() + 1; }
  std::size_t d() const { return a() + 2; }
  std::size_t scale(int j) const { return a() + 3 + static_cast<std::size_t>(j); }
  std::size_t size() const { return param_count(n, k); }
};

/// Admissible range of packed entry `index`.
ParamRange param_range(std::size_t index, int n, int k);

/// Lists every out-of-range parameter as "name = value not in [lo, hi]";
/// empty when the primitive is admissible.
std::vector<std::string> bound_violations(const SweepPrimitive& primitive);

/// Throws BoundsError naming every violated range.
void validate_bounds(const SweepPrimitive& primitive);

/// Sigmoidal reparameterization x = lo + (hi - lo) * sigmoid(z). Values at
/// or beyond a bound encode to a large finite z.
double decode_bounded(double z, const ParamRange& range);
double encode_bounded(double x, const ParamRange& range);
double decode_bounded_derivative(double z, const ParamRange& range);

std::vector<double> encode_params(std::span<const double> packed, int n, int k);
std::vector<double> decode_params(std::span<const double> unconstrained, int n, int k);
/// Diagonal of d packed / d unconstrained.
std::vector<double> decode_jacobian(std::span<const double> unconstrained, int n, int k);

double sigmoid(double z);
double logit(double p);

}  // namespace sweep
