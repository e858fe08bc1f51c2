#pragma once

#include <cmath>
#include <numbers>

namespace qord {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double rad) {
  double x = std::remainder(rad, two_pi);
  if (x <= -pi) x += two_pi;
  return x;
}

}  // namespace qord
