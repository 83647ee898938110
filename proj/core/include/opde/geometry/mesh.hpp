#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "opde/geometry/point_cloud.hpp"
#include "opde/geometry/transform.hpp"

namespace opde::geometry {

/// Indexed triangle mesh with counter-clockwise (outward) winding. Each
/// triangle carries a tag; tag 1 marks faces of a symmetry-breaking feature.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::uint8_t> tags;

  int add_vertex(const Vec3& v) {
    vertices.push_back(v);
    return static_cast<int>(vertices.size()) - 1;
  }
  void add_triangle(int a, int b, int c, std::uint8_t tag = 0) {
    triangles.push_back({a, b, c});
    tags.push_back(tag);
  }
  void add_quad(int a, int b, int c, int d, std::uint8_t tag = 0) {
    add_triangle(a, b, c, tag);
    add_triangle(a, c, d, tag);
  }

  Vec3 corner(std::size_t tri, int k) const { return vertices[static_cast<std::size_t>(triangles[tri][static_cast<std::size_t>(k)])]; }
  Vec3 face_normal(std::size_t tri) const;
  double face_area(std::size_t tri) const;

  Points vertex_matrix() const;
};

/// Signed volume by the divergence theorem (positive for outward winding).
double mesh_volume(const TriangleMesh& mesh);

/// True when every undirected edge is shared by exactly two triangles that
/// traverse it in opposite directions.
bool is_watertight(const TriangleMesh& mesh);

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Exact (brute force) Euclidean distance from p to the mesh surface.
double distance_to_mesh(const TriangleMesh& mesh, const Vec3& p);

/// Area-weighted uniform samples on the surface with the face normals.
PointCloud sample_surface(const TriangleMesh& mesh, std::size_t count, std::mt19937_64& rng);

TriangleMesh transformed(const TriangleMesh& mesh, const RigidTransform& t);

}  // namespace opde::geometry
