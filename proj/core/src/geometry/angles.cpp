#include "opde/geometry/angles.hpp"

#include <algorithm>
#include <cmath>

namespace opde::geometry {

double circular_angle_distance(double a_deg, double b_deg) {
  const double d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  return std::min(d, 360.0 - d);
}

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  return w >= 360.0 ? 0.0 : w;
}

}  // namespace opde::geometry
