#include "opde/synth/bin_world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opde/error.hpp"

namespace opde::synth {

using geometry::Mat3;

namespace {

// Ericson, Real-Time Collision Detection, 5.1.9.
double segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 1e-18 && e <= 1e-18) return r.norm();
  if (a <= 1e-18) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-18) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom != 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

}  // namespace

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng));
  } while (q.norm() < 1e-9);
  return q.normalized().toRotationMatrix();
}

BinWorld::BinWorld(const ObjectSpec& object, const Options& options)
    : object_(object),
      options_(options),
      object_bvh_(std::make_shared<MeshBvh>(make_object_mesh(object))),
      bin_bvh_(std::make_shared<MeshBvh>(make_bin_mesh(options.bin))) {
  const double half = 0.5 * options_.bin.inner_width;
  const double top = options_.bin.floor_z - options_.bin.wall_height;
  const double fov = 2.0 * std::atan(half / top) * 180.0 / std::numbers::pi;
  scene_camera_ = PinholeCamera::from_fov(options_.scene_resolution, options_.scene_resolution, fov);
}

bool BinWorld::collides(const RigidTransform& pose, const std::vector<RigidTransform>& others, std::size_t skip) const {
  const double r = object_.radius;
  const Vec3 axis = pose.rotate(Vec3::UnitZ()) * (0.5 * object_.height);
  const Vec3 a = pose.translation() - axis;
  const Vec3 b = pose.translation() + axis;
  const double half = 0.5 * options_.bin.inner_width;
  for (const Vec3& end : {a, b}) {
    if (end.z() + r > options_.bin.floor_z) return true;
    if (std::abs(end.x()) + r > half || std::abs(end.y()) + r > half) return true;
  }
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (i == skip) continue;
    const Vec3 oaxis = others[i].rotate(Vec3::UnitZ()) * (0.5 * object_.height);
    if (segment_distance(a, b, others[i].translation() - oaxis, others[i].translation() + oaxis) < 2.0 * r) {
      return true;
    }
  }
  return false;
}

std::optional<RigidTransform> BinWorld::sample_pose(std::mt19937_64& rng, const std::vector<RigidTransform>& others,
                                                    int attempts) const {
  const double half = 0.5 * options_.bin.inner_width;
  std::uniform_real_distribution<double> xy(-half, half);
  std::uniform_real_distribution<double> z(options_.bin.floor_z - options_.drop_height,
                                           options_.bin.floor_z - object_.radius);
  for (int i = 0; i < attempts; ++i) {
    const Mat3 rot = random_rotation(rng);
    const double px = xy(rng);
    const double py = xy(rng);
    const double pz = z(rng);
    const RigidTransform pose(rot, Vec3(px, py, pz));
    if (!collides(pose, others, others.size())) return pose;
  }
  return std::nullopt;
}

Scene BinWorld::render(const std::vector<RigidTransform>& poses) const {
  std::vector<SceneObject> objects;
  for (const auto& p : poses) objects.push_back({object_bvh_, p});
  return render_scene(objects, {bin_bvh_}, scene_camera_);
}

InstanceView BinWorld::render_instance(const std::vector<RigidTransform>& poses, std::size_t index) const {
  std::vector<MeshInstance> all;
  for (std::size_t i = 0; i < poses.size(); ++i) all.push_back({object_bvh_, poses[i], static_cast<int>(i)});
  all.push_back({bin_bvh_, RigidTransform::identity(), -1});

  const Vec3 center = poses.at(index).translation();
  const double crop = options_.instance_crop_factor * object_.bounding_radius();
  const double dist = center.norm();
  if (!(dist > crop)) throw DomainError("render_instance: camera inside the crop sphere");
  const double fov = 2.0 * std::atan(crop / dist) * 180.0 / std::numbers::pi;
  const auto camera = PinholeCamera::look_at(Vec3::Zero(), center, options_.instance_resolution, fov);
  const RenderedView view = render_view(all, camera);

  InstanceView out;
  const int id = static_cast<int>(index);
  out.object_pixels = view.count(id);
  out.feature_pixels = view.count(id, 1);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < view.cloud.positions.rows(); ++i) {
    if ((view.cloud.positions.row(i).transpose() - center).norm() <= crop) keep.push_back(i);
  }
  out.cloud = view.cloud.select(keep);
  return out;
}

}  // namespace opde::synth
