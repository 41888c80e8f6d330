#pragma once

#include "sweep/primitive.hpp"

namespace sweep {

/// Rotation by `degrees` (right-handed) about the world axis 'x', 'y' or
/// 'z' through the control-point centroid. Only the two coordinates in the
/// rotation plane are rewritten; quarter turns use exact sines and cosines.
SweepPrimitive rotate_primitive(const SweepPrimitive& primitive, char axis, double degrees);

SweepPrimitive translate_primitive(const SweepPrimitive& primitive, const Vec3& offset);

/// Sets scaling coefficient j (0-based). Throws DimensionError when j >= k.
SweepPrimitive set_scaling_coeff(const SweepPrimitive& primitive, int j, double value);

/// Sets profile parameter 'a', 'b' or 'd'.
SweepPrimitive set_profile_param(const SweepPrimitive& primitive, char name, double value);

}  // namespace sweep
