#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "opde/synth/object_mesh.hpp"
#include "opde/synth/raycast.hpp"
#include "opde/synth/scene.hpp"

namespace opde::synth {

/// A close-up render of one object instance, cropped to a sphere around its
/// ground-truth center.
struct InstanceView {
  geometry::PointCloud cloud;     // camera frame
  std::size_t object_pixels = 0;  // pixels of this instance in the close-up
  std::size_t feature_pixels = 0; // of those, pixels on feature faces
};

/// A bin of identical parts seen by a fixed camera at the origin looking
/// along +z. Positions are rejection-sampled so that the enclosing capsules
/// of the parts neither overlap each other nor leave the bin.
class BinWorld {
 public:
  struct Options {
    BinSpec bin;
    int scene_resolution = 256;
    int instance_resolution = 128;
    double instance_crop_factor = 1.5;  // in bounding radii
    double drop_height = 0.04;          // highest part center above the floor
  };

  BinWorld(const ObjectSpec& object, const Options& options);

  const ObjectSpec& object() const { return object_; }
  const Options& options() const { return options_; }
  const std::shared_ptr<const MeshBvh>& object_bvh() const { return object_bvh_; }
  const PinholeCamera& scene_camera() const { return scene_camera_; }

  /// Uniformly random pose that does not collide with `others`.
  std::optional<RigidTransform> sample_pose(std::mt19937_64& rng, const std::vector<RigidTransform>& others,
                                            int attempts) const;
  bool collides(const RigidTransform& pose, const std::vector<RigidTransform>& others, std::size_t skip) const;

  Scene render(const std::vector<RigidTransform>& poses) const;
  InstanceView render_instance(const std::vector<RigidTransform>& poses, std::size_t index) const;

 private:
  ObjectSpec object_;
  Options options_;
  std::shared_ptr<const MeshBvh> object_bvh_;
  std::shared_ptr<const MeshBvh> bin_bvh_;
  PinholeCamera scene_camera_;
};

/// Uniformly distributed rotation.
geometry::Mat3 random_rotation(std::mt19937_64& rng);

}  // namespace opde::synth
