#include "opde/synth/augment.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/SVD>

#include "opde/error.hpp"
#include "opde/geometry/preprocess.hpp"
#include "opde/geometry/sample_grid.hpp"

namespace opde::synth {

using geometry::Mat3;
using geometry::Vec3;

GridBin residual_bin(const RigidTransform& init_pose, const RigidTransform& gt_pose, int n_revolution) {
  if (n_revolution < 1) throw DomainError("residual_bin: n_revolution must be >= 1");
  const Mat3 view_init = init_pose.rotation().transpose();
  const Mat3 view_gt = gt_pose.rotation().transpose();
  const double step = 360.0 / n_revolution;
  GridBin best;
  double best_angle = std::numeric_limits<double>::infinity();
  for (int ref = 0; ref < 2; ++ref) {
    const Mat3 flip = geometry::rot_y(180.0 * ref);
    for (int j = 0; j < n_revolution; ++j) {
      const double angle = geometry::geodesic_deg(flip * geometry::rot_z(j * step) * view_init, view_gt);
      if (angle < best_angle) {
        best_angle = angle;
        best = {ref, j, j * step, static_cast<std::size_t>(ref) * n_revolution + j};
      }
    }
  }
  return best;
}

RigidTransform candidate_pose(const RigidTransform& init_pose, int reflection, double revolution_deg) {
  return geometry::compose_sample_transform(180.0 * reflection, revolution_deg, init_pose.inverse()).inverse();
}

JitterResult jitter_pose(const RigidTransform& gt_pose, std::mt19937_64& rng, const JitterConfig& config) {
  if (config.translation_std == 0.0 && config.tilt_std_deg == 0.0 && config.revolution_std_deg == 0.0 &&
      !config.randomize_symmetry && !config.forced_reflection && config.forced_revolution_deg == 0.0) {
    return {gt_pose, {0, 0, 0.0, 0}};
  }
  // View rotations (camera -> object). Perturbations about object axes act
  // from the left.
  Mat3 view = gt_pose.rotation().transpose();
  if (config.forced_reflection) view = geometry::rot_y(180.0) * view;
  if (config.forced_revolution_deg != 0.0) view = geometry::rot_z(config.forced_revolution_deg) * view;
  if (config.randomize_symmetry) {
    const bool flip = std::bernoulli_distribution(0.5)(rng);
    const double revo = std::uniform_real_distribution<double>(0.0, 360.0)(rng);
    view = geometry::rot_z(revo) * geometry::rot_y(flip ? 180.0 : 0.0) * view;
  }
  Vec3 tilt = Vec3::Zero();
  if (config.tilt_std_deg > 0.0) {
    std::normal_distribution<double> n(0.0, config.tilt_std_deg);
    tilt.x() = n(rng);
    tilt.y() = n(rng);
  }
  if (config.revolution_std_deg > 0.0) tilt.z() = std::normal_distribution<double>(0.0, config.revolution_std_deg)(rng);
  if (tilt.squaredNorm() > 0.0) view = geometry::axis_angle(tilt, tilt.norm()) * view;

  Vec3 translation = gt_pose.translation();
  if (config.translation_std > 0.0) {
    std::normal_distribution<double> n(0.0, config.translation_std);
    for (int a = 0; a < 3; ++a) translation[a] += n(rng);
  }

  // re-orthonormalize the accumulated product
  Eigen::JacobiSVD<Mat3> svd(view, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 clean = svd.matrixU() * svd.matrixV().transpose();
  const RigidTransform init(clean.transpose(), translation);
  return {init, residual_bin(init, gt_pose, config.n_revolution)};
}

geometry::PointCloud augment_depth(const geometry::PointCloud& cloud, std::mt19937_64& rng,
                                   const DepthAugmentConfig& config) {
  if (config.point_dropout < 0.0 || config.point_dropout >= 1.0) {
    throw DomainError("augment_depth: point_dropout must be in [0, 1)");
  }
  geometry::PointCloud noisy = cloud;
  if (config.noise_std > 0.0) {
    std::normal_distribution<double> n(0.0, config.noise_std);
    for (Eigen::Index i = 0; i < noisy.positions.rows(); ++i) {
      const Vec3 p = noisy.positions.row(i).transpose();
      const Vec3 ray = p - config.view_origin;
      const double len = ray.norm();
      if (len > 0.0) noisy.positions.row(i) = (p + n(rng) * ray / len).transpose();
    }
  }

  std::vector<char> keep(noisy.size(), 1);
  if (config.point_dropout > 0.0) {
    std::bernoulli_distribution drop(config.point_dropout);
    for (auto& k : keep) k = drop(rng) ? 0 : 1;
  }

  const int patches = config.max_patches > 0 ? std::uniform_int_distribution<int>(0, config.max_patches)(rng) : 0;
  std::uniform_real_distribution<double> axis_len(config.patch_min_axis, config.patch_max_axis);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::vector<char> before_patches = keep;
  for (int p = 0; p < patches && !noisy.empty(); ++p) {
    const auto c = std::uniform_int_distribution<Eigen::Index>(0, noisy.positions.rows() - 1)(rng);
    const Vec3 center = noisy.positions.row(c).transpose();
    Vec3 view_dir = center - config.view_origin;
    view_dir = view_dir.norm() > 0.0 ? Vec3(view_dir.normalized()) : Vec3::UnitZ();
    const Vec3 helper = std::abs(view_dir.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = view_dir.cross(helper).normalized();
    const Vec3 e2 = view_dir.cross(e1);
    const double theta = angle(rng);
    const Vec3 u = std::cos(theta) * e1 + std::sin(theta) * e2;
    const Vec3 v = view_dir.cross(u);
    const double a = axis_len(rng);
    const double b = axis_len(rng);
    for (Eigen::Index i = 0; i < noisy.positions.rows(); ++i) {
      const Vec3 d = noisy.positions.row(i).transpose() - center;
      const double du = d.dot(u) / a;
      const double dv = d.dot(v) / b;
      if (du * du + dv * dv <= 1.0) keep[static_cast<std::size_t>(i)] = 0;
    }
  }

  auto survivors = [](const std::vector<char>& mask) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) idx.push_back(static_cast<Eigen::Index>(i));
    }
    return idx;
  };
  std::vector<Eigen::Index> idx = survivors(keep);
  if (idx.empty()) idx = survivors(before_patches);
  if (idx.empty()) idx = survivors(std::vector<char>(noisy.size(), 1));
  geometry::PointCloud out = noisy.select(idx);
  if (config.target_points > 0 && !out.empty()) out = geometry::resample(out, config.target_points, rng);
  return out;
}

}  // namespace opde::synth
