#include "opde/synth/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "opde/error.hpp"

namespace opde::synth {
namespace {

constexpr int kLeafTriangles = 4;

bool slab_hit(const Eigen::AlignedBox3d& box, const Vec3& origin, const Vec3& inv_dir, double t_min, double t_max) {
  for (int a = 0; a < 3; ++a) {
    double t0 = (box.min()[a] - origin[a]) * inv_dir[a];
    double t1 = (box.max()[a] - origin[a]) * inv_dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_max < t_min) return false;
  }
  return true;
}

// Moller-Trumbore, double sided.
bool intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c, double& t) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  t = e2.dot(q) * inv;
  return true;
}

}  // namespace

MeshBvh::MeshBvh(geometry::TriangleMesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.triangles.empty()) throw DomainError("MeshBvh: mesh has no triangles");
  order_.resize(mesh_.triangles.size());
  std::iota(order_.begin(), order_.end(), 0);
  build(0, static_cast<int>(order_.size()));

  Eigen::AlignedBox3d all;
  for (const auto& v : mesh_.vertices) all.extend(v);
  center_ = all.center();
  for (const auto& v : mesh_.vertices) radius_ = std::max(radius_, (v - center_).norm());
}

int MeshBvh::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroids;
  for (int i = begin; i < end; ++i) {
    const auto t = static_cast<std::size_t>(order_[static_cast<std::size_t>(i)]);
    for (int k = 0; k < 3; ++k) box.extend(mesh_.corner(t, k));
    centroids.extend(((mesh_.corner(t, 0) + mesh_.corner(t, 1) + mesh_.corner(t, 2)) / 3.0).eval());
  }
  nodes_[static_cast<std::size_t>(id)].box = box;
  nodes_[static_cast<std::size_t>(id)].begin = begin;
  nodes_[static_cast<std::size_t>(id)].end = end;
  if (end - begin <= kLeafTriangles) return id;

  int axis = 0;
  centroids.sizes().maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
    const auto ta = static_cast<std::size_t>(a);
    const auto tb = static_cast<std::size_t>(b);
    return mesh_.corner(ta, 0)[axis] + mesh_.corner(ta, 1)[axis] + mesh_.corner(ta, 2)[axis] <
           mesh_.corner(tb, 0)[axis] + mesh_.corner(tb, 1)[axis] + mesh_.corner(tb, 2)[axis];
  });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

std::optional<Hit> MeshBvh::intersect(const Ray& ray, double t_min, double t_max) const {
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  std::optional<Hit> best;
  double best_t = t_max;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    if (!slab_hit(node.box, ray.origin, inv_dir, t_min, best_t)) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const auto tri = static_cast<std::size_t>(order_[static_cast<std::size_t>(i)]);
        double t = 0.0;
        if (intersect_triangle(ray, mesh_.corner(tri, 0), mesh_.corner(tri, 1), mesh_.corner(tri, 2), t) &&
            t > t_min && t < best_t) {
          best_t = t;
          best = Hit{t, static_cast<int>(tri)};
        }
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

PinholeCamera PinholeCamera::from_fov(int width, int height, double fov_deg, const RigidTransform& pose) {
  if (width <= 0 || height <= 0 || !(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw DomainError("PinholeCamera: bad resolution or field of view");
  }
  PinholeCamera cam;
  cam.width = width;
  cam.height = height;
  cam.fx = cam.fy = 0.5 * width / std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.camera_to_world = pose;
  return cam;
}

PinholeCamera PinholeCamera::look_at(const Vec3& eye, const Vec3& target, int size, double fov_deg) {
  const Vec3 z = (target - eye).normalized();
  Vec3 up_hint = std::abs(z.y()) < 0.9 ? Vec3::UnitY() : Vec3::UnitX();
  const Vec3 x = up_hint.cross(z).normalized();
  const Vec3 y = z.cross(x);
  geometry::Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return from_fov(size, size, fov_deg, RigidTransform(r, eye));
}

Ray PinholeCamera::pixel_ray(int u, int v) const {
  const Vec3 d((u + 0.5 - cx) / fx, (v + 0.5 - cy) / fy, 1.0);
  return {camera_to_world.translation(), camera_to_world.rotate(d.normalized())};
}

std::size_t RenderedView::count(int id) const {
  return static_cast<std::size_t>(std::count(instance.begin(), instance.end(), id));
}

std::size_t RenderedView::count(int id, std::uint8_t with_tag) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < instance.size(); ++i) n += (instance[i] == id && tag[i] == with_tag) ? 1 : 0;
  return n;
}

RenderedView render_view(const std::vector<MeshInstance>& instances, const PinholeCamera& camera) {
  struct Local {
    const MeshInstance* inst;
    RigidTransform world_to_object;
    Vec3 center_world;
    double radius;
  };
  std::vector<Local> locals;
  locals.reserve(instances.size());
  for (const auto& inst : instances) {
    locals.push_back({&inst, inst.pose.inverse(), inst.pose * inst.bvh->bounding_center(), inst.bvh->bounding_radius()});
  }

  std::vector<Vec3> points, normals;
  RenderedView view;
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const Ray ray = camera.pixel_ray(u, v);
      double best_t = std::numeric_limits<double>::infinity();
      const Local* best_inst = nullptr;
      int best_tri = -1;
      for (const auto& loc : locals) {
        // bounding sphere rejection
        const Vec3 oc = loc.center_world - ray.origin;
        const double along = oc.dot(ray.direction);
        const double miss2 = oc.squaredNorm() - along * along;
        if (miss2 > loc.radius * loc.radius * (1.0 + 1e-9) + 1e-18) continue;
        if (along + loc.radius < 0.0 || along - loc.radius > best_t) continue;

        const Ray local{loc.world_to_object * ray.origin, loc.world_to_object.rotate(ray.direction)};
        if (auto hit = loc.inst->bvh->intersect(local, 1e-9, best_t)) {
          best_t = hit->t;
          best_inst = &loc;
          best_tri = hit->triangle;
        }
      }
      if (best_inst == nullptr) continue;
      const auto& mesh = best_inst->inst->bvh->mesh();
      Vec3 n = best_inst->inst->pose.rotate(mesh.face_normal(static_cast<std::size_t>(best_tri)));
      if (n.dot(ray.direction) > 0.0) n = -n;
      points.push_back(ray.origin + best_t * ray.direction);
      normals.push_back(n);
      view.instance.push_back(best_inst->inst->id);
      view.tag.push_back(mesh.tags[static_cast<std::size_t>(best_tri)]);
      view.pixel.push_back(v * camera.width + u);
    }
  }
  view.cloud.positions.resize(static_cast<Eigen::Index>(points.size()), 3);
  view.cloud.normals.resize(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    view.cloud.positions.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    view.cloud.normals.row(static_cast<Eigen::Index>(i)) = normals[i].transpose();
  }
  return view;
}

}  // namespace opde::synth
