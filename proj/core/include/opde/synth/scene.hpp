#pragma once

#include <memory>
#include <vector>

#include "opde/geometry/mesh.hpp"
#include "opde/synth/raycast.hpp"

namespace opde::synth {

// Simple meshes used for bins and for testing the renderer.
geometry::TriangleMesh make_rectangle(const Vec3& corner, const Vec3& edge_u, const Vec3& edge_v);
geometry::TriangleMesh make_uv_sphere(double radius, int stacks = 32, int slices = 64);

/// Open-topped box: floor at z = floor_z, walls rising toward the camera
/// (decreasing z) by wall_height. Centered on the optical axis.
struct BinSpec {
  double inner_width = 0.12;
  double floor_z = 0.45;
  double wall_height = 0.05;
};
geometry::TriangleMesh make_bin_mesh(const BinSpec& bin);

struct SceneObject {
  std::shared_ptr<const MeshBvh> bvh;
  RigidTransform pose;  // object -> world (camera frame of the scene camera)
};

/// A rendered scene. `visibilities[i]` is the fraction of object i's solo
/// render (same camera) that remains visible in the full scene.
struct Scene {
  std::vector<RigidTransform> object_poses;
  PinholeCamera camera;
  geometry::PointCloud cloud;
  std::vector<int> point_instance;  // -1 for static geometry
  std::vector<double> visibilities;
  std::vector<std::size_t> visible_pixels;
  std::vector<std::size_t> solo_pixels;
};

/// Throws DataError when no ray hits anything.
Scene render_scene(const std::vector<SceneObject>& objects, const std::vector<std::shared_ptr<const MeshBvh>>& statics,
                   const PinholeCamera& camera);

}  // namespace opde::synth
