#pragma once

#include <cstddef>
#include <vector>

#include "opde/geometry/transform.hpp"

namespace opde::geometry {

/// Candidate transform R_y(theta_ref) * R_z(theta_revo) * t_init.
///
/// The transforms are camera-to-object maps: the rows of the rotation are the
/// object axes seen from the camera, so the left-multiplied R_z spins the
/// object about its own symmetry axis and R_y flips its two ends. Keypoints
/// given in the object frame are placed into the cloud frame by the inverse.
///
/// Throws DomainError unless theta_ref is 0 or 180.
RigidTransform compose_sample_transform(double theta_ref_deg, double theta_revo_deg,
                                        const RigidTransform& t_init);

struct SampleEntry {
  int reflection_index = 0;  // 0 or 1
  int revolution_index = 0;  // 0 .. n_revolution-1
  double revolution_deg = 0.0;
  RigidTransform transform;
};

/// The 2 x n_revolution candidates, reflection-major, revolution ascending.
class SampleGrid {
 public:
  SampleGrid(const RigidTransform& t_init, int n_revolution = 360);

  std::size_t size() const { return entries_.size(); }
  int n_revolution() const { return n_revolution_; }
  double step_deg() const { return 360.0 / n_revolution_; }
  const RigidTransform& t_init() const { return t_init_; }

  const SampleEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<SampleEntry>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::size_t index_of(int reflection_index, int revolution_index) const {
    return static_cast<std::size_t>(reflection_index) * n_revolution_ + revolution_index;
  }

 private:
  RigidTransform t_init_;
  int n_revolution_;
  std::vector<SampleEntry> entries_;
};

/// Throws DomainError when n_revolution < 1.
SampleGrid build_sample_grid(const RigidTransform& t_init, int n_revolution = 360);

}  // namespace opde::geometry
