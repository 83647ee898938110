#pragma once

#include <cstddef>
#include <random>

#include "opde/geometry/point_cloud.hpp"
#include "opde/geometry/transform.hpp"

namespace opde::synth {

using geometry::RigidTransform;

/// Perturbation of a ground-truth pose into an initial estimate.
///
/// Standard deviations are in meters and degrees about the object axes. When
/// `randomize_symmetry` is set, the estimate also carries a uniformly random
/// revolution and reflection, which is what an initial estimator that cannot
/// see through the symmetry returns. `forced_*` inject a fixed offset.
struct JitterConfig {
  double translation_std = 0.001;
  double tilt_std_deg = 3.0;
  double revolution_std_deg = 0.5;
  bool randomize_symmetry = true;
  int n_revolution = 360;
  double forced_revolution_deg = 0.0;
  bool forced_reflection = false;

  static JitterConfig none() { return {0.0, 0.0, 0.0, false}; }
};

struct GridBin {
  int reflection = 0;
  int revolution_index = 0;
  double revolution_deg = 0.0;
  std::size_t index = 0;  // position in the sample grid

  bool operator==(const GridBin&) const = default;
};

struct JitterResult {
  RigidTransform t_init;  // object -> camera, like the ground truth
  GridBin residual;
};

/// Grid bin b minimizing the geodesic angle between the rotation of
/// (R_y R_z)_b * init^-1 and gt^-1, i.e. the candidate that undoes the error
/// of `init_pose`. Poses map object to camera. Exhaustive over all bins.
GridBin residual_bin(const RigidTransform& init_pose, const RigidTransform& gt_pose, int n_revolution = 360);

/// Object pose of grid candidate `bin` built around `init_pose`.
RigidTransform candidate_pose(const RigidTransform& init_pose, int reflection, double revolution_deg);

JitterResult jitter_pose(const RigidTransform& gt_pose, std::mt19937_64& rng, const JitterConfig& config = {});

/// Depth-sensor style corruption. Noise runs along the ray from
/// `view_origin`; patches are elliptical holes in the image plane.
struct DepthAugmentConfig {
  double noise_std = 0.0003;
  double point_dropout = 0.1;
  int max_patches = 2;
  double patch_min_axis = 0.001;
  double patch_max_axis = 0.004;
  std::size_t target_points = 4096;  // 0 keeps the surviving points as they are
  geometry::Vec3 view_origin = geometry::Vec3::Zero();

  static DepthAugmentConfig none() { return {0.0, 0.0, 0, 0.001, 0.004, 4096}; }
};

geometry::PointCloud augment_depth(const geometry::PointCloud& cloud, std::mt19937_64& rng,
                                   const DepthAugmentConfig& config = {});

}  // namespace opde::synth
