#include "opde/geometry/sample_grid.hpp"

#include <string>

#include "opde/error.hpp"

namespace opde::geometry {

RigidTransform compose_sample_transform(double theta_ref_deg, double theta_revo_deg,
                                        const RigidTransform& t_init) {
  if (theta_ref_deg != 0.0 && theta_ref_deg != 180.0) {
    throw DomainError("theta_ref must be 0 or 180 degrees, got " + std::to_string(theta_ref_deg));
  }
  if (theta_ref_deg == 0.0 && theta_revo_deg == 0.0) return t_init;
  return RigidTransform::from_rotation(rot_y(theta_ref_deg) * rot_z(theta_revo_deg)) * t_init;
}

SampleGrid::SampleGrid(const RigidTransform& t_init, int n_revolution)
    : t_init_(t_init), n_revolution_(n_revolution) {
  if (n_revolution < 1) throw DomainError("n_revolution must be >= 1");
  entries_.reserve(2 * static_cast<std::size_t>(n_revolution));
  const double step = 360.0 / n_revolution;
  for (int ref = 0; ref < 2; ++ref) {
    for (int j = 0; j < n_revolution; ++j) {
      const double revo = j * step;
      entries_.push_back({ref, j, revo, compose_sample_transform(180.0 * ref, revo, t_init)});
    }
  }
}

SampleGrid build_sample_grid(const RigidTransform& t_init, int n_revolution) {
  return SampleGrid(t_init, n_revolution);
}

}  // namespace opde::geometry
