#pragma once

namespace opde::geometry {

/// Shortest distance between two angles on the circle, in degrees, in [0, 180].
double circular_angle_distance(double a_deg, double b_deg);

/// Wraps an angle into [0, 360).
double wrap_degrees(double deg);

}  // namespace opde::geometry
