#pragma once

#include <cstdint>
#include <filesystem>

#include "opde/geometry/point_cloud.hpp"
#include "opde/nn/adam.hpp"
#include "opde/nn/model.hpp"
#include "opde/synth/object_mesh.hpp"

namespace opde::pipeline {

/// Everything needed to score poses of one object: network configuration and
/// weights, the object description and its fixed keypoints.
struct PoseModel {
  nn::ModelConfig config;
  synth::ObjectSpec object;
  geometry::Points keypoints;  // object frame, meters
  double crop_factor = 1.2;
  nn::ModelParams<float> params;

  double radius() const { return object.bounding_radius(); }
  /// Keypoints in normalized units (divided by the object radius).
  geometry::Points normalized_keypoints() const { return keypoints / radius(); }
};

/// Fresh model: keypoints by farthest point sampling on the object mesh
/// (`keypoint_seed`), weights initialized from `weight_seed`.
PoseModel make_pose_model(const nn::ModelConfig& config, const synth::ObjectSpec& object,
                          std::uint64_t weight_seed, std::uint64_t keypoint_seed = 0);

void save_pose_model(const std::filesystem::path& path, const PoseModel& model);
/// Throws DataError when the file is not a model file or its tensors do not
/// match the stored configuration.
PoseModel load_pose_model(const std::filesystem::path& path);

void save_optimizer_state(const std::filesystem::path& path, const nn::ModelParams<float>& params,
                          const nn::AdamState<float>& state);
nn::AdamState<float> load_optimizer_state(const std::filesystem::path& path, const nn::ModelParams<float>& params);

}  // namespace opde::pipeline
