#pragma once

#include "sweep/frames.hpp"
#include "sweep/primitive.hpp"

#include <Eigen/Geometry>

#include <span>
#include <vector>

namespace sweep {

/// Soft occupancy settings. Sharpnesses are in inverse cube units.
struct FieldConfig {
  int frames = 48;
  /// Sharpness floor of the bounding planes.
  double sharpness = 200.0;
  /// Profile-membership sharpness across the contour.
  double profile_sharpness = 200.0;
  /// Extra plane sharpness in units of 1 / mean frame spacing; keeps wedge
  /// edges crisp relative to the spacing so the interior saturates.
  double slab_resolution = 6.0;
};

/// Sigmoid arguments below -kFieldCutoff contribute < 1e-13 and are skipped.
inline constexpr double kFieldCutoff = 30.0;

/// Analytic soft occupancy of one primitive, prepared for many queries.
///
/// Frame i owns the wedge between the planes of frames i - 1 and i + 1
/// (clamped at the ends) and carries the profile scaled by f(t_i). With
/// signed plane distances w_l, w_u and A = sigma(ks w_l), B = sigma(ks w_u),
///   mu_i = (A (1 - B) + (1 - A) B) sigma(kp c_i (1 - r_i))
/// where r_i is the superellipse gauge g^(1/d) in frame i (r = 1 on the
/// contour) and c_i = f(t_i) hypot(a, b) turns gauge units into lengths.
/// The exclusive-or form also covers wedges whose planes have crossed
/// inside a fold. The field is the smooth union 1 - prod(1 - mu_i).
class SoftField {
 public:
  SoftField(const SweepPrimitive& primitive, const FieldConfig& config = {}, bool with_gradient = false);

  double value(const Vec3& query) const;

  /// Value and d value / d packed parameter (raw, not reparameterized).
  /// Requires construction with with_gradient = true.
  double value_and_gradient(const Vec3& query, std::span<double> gradient) const;

  /// Box outside of which the field is below 1e-13.
  const Eigen::AlignedBox3d& support() const { return support_; }
  std::size_t param_count() const { return layout_.size(); }
  const ParamLayout& layout() const { return layout_; }
  double slab_sharpness() const { return slab_kappa_; }

 private:
  struct Slab {
    Vec3 origin, tangent, normal, binormal;
    int lower = 0, upper = 0;  // frames whose planes bound the wedge
    double scale = 1.0;
    double reach = 0.0;
  };
  struct SlabJet {
    Eigen::Matrix<double, 3, Eigen::Dynamic> d_origin, d_tangent, d_normal, d_binormal;
    std::vector<double> d_scale;  // w.r.t. scaling coefficients
  };
  template <bool kGradient>
  double evaluate(const Vec3& query, std::span<double> gradient) const;

  ParamLayout layout_;
  SuperellipseProfile profile_;
  double profile_sharpness_ = 200.0;
  double slab_kappa_ = 200.0;
  double hyp_ = 0.0;
  std::vector<Slab> slabs_;
  std::vector<SlabJet> jets_;
  Eigen::RowVectorXd d_slab_kappa_;
  Eigen::AlignedBox3d support_;
};

double soft_occupancy(const SweepPrimitive& primitive, const Vec3& query, const FieldConfig& config = {});

/// Hard occupancy by dense frames. A query is inside when some frame has
/// |w| <= h_i and g(u, v) <= 1 (h_i half the larger spacing to the
/// neighbouring origins), or when its signed distances to the planes of
/// frames i and i + 1 differ in sign and it is inside the slice linearly
/// interpolated between them. The second test closes the wedges that flat
/// slabs leave on the outer side of bends and behind folds.
class OracleSweep {
 public:
  OracleSweep(const SweepPrimitive& primitive, int dense_frames = 512);

  bool contains(const Vec3& query) const;
  const Eigen::AlignedBox3d& support() const { return support_; }

 private:
  struct Disk {
    Vec3 origin, tangent, normal, binormal;
    double half_width = 0.0;
    double a = 0.0, b = 0.0;
  };
  bool inside_disk(const Disk& disk, const Vec3& query) const;
  bool inside_between(const Disk& lo, const Disk& hi, const Vec3& query) const;

  std::vector<Disk> disks_;
  double degree_ = 2.0;
  double reach_ = 0.0;
  Eigen::AlignedBox3d support_;
};

int oracle_occupancy(const SweepPrimitive& primitive, const Vec3& query, int dense_frames = 512);

/// sum v_i e^(alpha v_i) / sum e^(alpha v_i), overflow-safe.
double union_boltzmann(std::span<const double> values, double alpha);

/// d union / d v_i for every i.
std::vector<double> union_boltzmann_gradient(std::span<const double> values, double alpha);

/// Central finite differences of the soft field with respect to the
/// sigmoid-reparameterized (unconstrained) parameters; rows are queries.
Eigen::MatrixXd grad_params(const SweepPrimitive& primitive, std::span<const Vec3> queries,
                            const FieldConfig& config = {}, double step = 1e-3);

}  // namespace sweep
