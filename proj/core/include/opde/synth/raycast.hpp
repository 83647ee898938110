#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "opde/geometry/mesh.hpp"
#include "opde/geometry/point_cloud.hpp"
#include "opde/geometry/transform.hpp"

namespace opde::synth {

using geometry::RigidTransform;
using geometry::Vec3;

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
};

struct Hit {
  double t = 0.0;
  int triangle = -1;
};

/// Bounding volume hierarchy over one mesh in its own frame.
class MeshBvh {
 public:
  explicit MeshBvh(geometry::TriangleMesh mesh);

  const geometry::TriangleMesh& mesh() const { return mesh_; }
  const Vec3& bounding_center() const { return center_; }
  double bounding_radius() const { return radius_; }

  /// Nearest intersection with t in (t_min, t_max); both triangle sides count.
  std::optional<Hit> intersect(const Ray& ray, double t_min = 1e-9,
                               double t_max = std::numeric_limits<double>::infinity()) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };
  int build(int begin, int end);

  geometry::TriangleMesh mesh_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  Vec3 center_ = Vec3::Zero();
  double radius_ = 0.0;
};

/// Pinhole camera looking along its +z axis, x right and y down in the image.
struct PinholeCamera {
  int width = 128;
  int height = 128;
  double fx = 100.0, fy = 100.0, cx = 64.0, cy = 64.0;
  RigidTransform camera_to_world;

  /// Square image with the given full field of view (degrees).
  static PinholeCamera from_fov(int width, int height, double fov_deg, const RigidTransform& pose = {});
  /// Camera at `eye` whose optical axis passes through `target`.
  static PinholeCamera look_at(const Vec3& eye, const Vec3& target, int size, double fov_deg);

  Ray pixel_ray(int u, int v) const;
};

struct MeshInstance {
  std::shared_ptr<const MeshBvh> bvh;
  RigidTransform pose;  // object -> world
  int id = -1;          // -1 for static geometry
};

/// One ray-cast view: a point per pixel that hit something.
struct RenderedView {
  geometry::PointCloud cloud;          // world frame
  std::vector<int> instance;           // per point
  std::vector<std::uint8_t> tag;       // per point, triangle tag of the hit
  std::vector<int> pixel;              // per point, v * width + u

  /// Pixels hitting instance `id` (optionally only faces with `tag`).
  std::size_t count(int id) const;
  std::size_t count(int id, std::uint8_t with_tag) const;
};

/// Casts one ray per pixel through all instances; normals are the hit
/// triangle's geometric normal oriented toward the camera.
RenderedView render_view(const std::vector<MeshInstance>& instances, const PinholeCamera& camera);

}  // namespace opde::synth
