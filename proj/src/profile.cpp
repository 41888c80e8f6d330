#include "sweep/profile.hpp"

#include <cmath>

namespace sweep {

namespace {

double signed_power(double c, double exponent) {
  if (c == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(c), exponent), c);
}

}  // namespace

Vec2 profile_point(const SuperellipseProfile& profile, double theta) {
  const double e = 2.0 / profile.d;
  return {profile.a * signed_power(std::cos(theta), e),
          profile.b * signed_power(std::sin(theta), e)};
}

double profile_implicit(const SuperellipseProfile& profile, const Vec2& p) {
  return std::pow(std::abs(p.x() / profile.a), profile.d) +
         std::pow(std::abs(p.y() / profile.b), profile.d);
}

}  // namespace sweep
