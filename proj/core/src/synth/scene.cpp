#include "opde/synth/scene.hpp"

#include <cmath>
#include <numbers>

#include "opde/error.hpp"

namespace opde::synth {

using geometry::TriangleMesh;

TriangleMesh make_rectangle(const Vec3& corner, const Vec3& edge_u, const Vec3& edge_v) {
  TriangleMesh m;
  const int a = m.add_vertex(corner);
  const int b = m.add_vertex(corner + edge_u);
  const int c = m.add_vertex(corner + edge_u + edge_v);
  const int d = m.add_vertex(corner + edge_v);
  m.add_quad(a, b, c, d);
  return m;
}

TriangleMesh make_uv_sphere(double radius, int stacks, int slices) {
  if (!(radius > 0.0) || stacks < 2 || slices < 3) throw DomainError("make_uv_sphere: bad parameters");
  TriangleMesh m;
  const int south = m.add_vertex(Vec3(0, 0, -radius));
  std::vector<std::vector<int>> rings;
  for (int i = 1; i < stacks; ++i) {
    const double phi = -0.5 * std::numbers::pi + std::numbers::pi * i / stacks;
    std::vector<int> ring;
    for (int j = 0; j < slices; ++j) {
      const double th = 2.0 * std::numbers::pi * j / slices;
      ring.push_back(m.add_vertex(radius * Vec3(std::cos(phi) * std::cos(th), std::cos(phi) * std::sin(th), std::sin(phi))));
    }
    rings.push_back(std::move(ring));
  }
  const int north = m.add_vertex(Vec3(0, 0, radius));
  const auto at = [&](std::size_t ring, int j) { return rings[ring][static_cast<std::size_t>(j % slices)]; };
  for (int j = 0; j < slices; ++j) m.add_triangle(south, at(0, j + 1), at(0, j));
  for (std::size_t i = 0; i + 1 < rings.size(); ++i) {
    for (int j = 0; j < slices; ++j) m.add_quad(at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j));
  }
  for (int j = 0; j < slices; ++j) m.add_triangle(north, at(rings.size() - 1, j), at(rings.size() - 1, j + 1));
  return m;
}

TriangleMesh make_bin_mesh(const BinSpec& bin) {
  const double h = 0.5 * bin.inner_width;
  const double z0 = bin.floor_z;
  const double z1 = bin.floor_z - bin.wall_height;
  TriangleMesh m;
  auto append = [&](const TriangleMesh& part) {
    const int base = static_cast<int>(m.vertices.size());
    m.vertices.insert(m.vertices.end(), part.vertices.begin(), part.vertices.end());
    for (const auto& t : part.triangles) m.add_triangle(t[0] + base, t[1] + base, t[2] + base);
  };
  append(make_rectangle(Vec3(-h, -h, z0), Vec3(2 * h, 0, 0), Vec3(0, 2 * h, 0)));
  append(make_rectangle(Vec3(-h, -h, z0), Vec3(0, 2 * h, 0), Vec3(0, 0, z1 - z0)));
  append(make_rectangle(Vec3(h, -h, z0), Vec3(0, 2 * h, 0), Vec3(0, 0, z1 - z0)));
  append(make_rectangle(Vec3(-h, -h, z0), Vec3(2 * h, 0, 0), Vec3(0, 0, z1 - z0)));
  append(make_rectangle(Vec3(-h, h, z0), Vec3(2 * h, 0, 0), Vec3(0, 0, z1 - z0)));
  return m;
}

Scene render_scene(const std::vector<SceneObject>& objects, const std::vector<std::shared_ptr<const MeshBvh>>& statics,
                   const PinholeCamera& camera) {
  std::vector<MeshInstance> all;
  for (std::size_t i = 0; i < objects.size(); ++i) all.push_back({objects[i].bvh, objects[i].pose, static_cast<int>(i)});
  for (const auto& s : statics) all.push_back({s, RigidTransform::identity(), -1});

  RenderedView view = render_view(all, camera);
  if (view.cloud.empty()) throw DataError("render_scene: no ray hit any geometry");

  Scene scene;
  scene.camera = camera;
  for (const auto& o : objects) scene.object_poses.push_back(o.pose);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::size_t visible = view.count(static_cast<int>(i));
    const RenderedView solo = render_view({all[i]}, camera);
    const std::size_t alone = solo.cloud.size();
    scene.visible_pixels.push_back(visible);
    scene.solo_pixels.push_back(alone);
    scene.visibilities.push_back(alone == 0 ? 0.0 : static_cast<double>(visible) / static_cast<double>(alone));
  }
  scene.cloud = std::move(view.cloud);
  scene.point_instance = std::move(view.instance);
  return scene;
}

}  // namespace opde::synth
