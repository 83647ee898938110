#pragma once

#include <cstdint>
#include <memory>
#include <random>

#include "opde/dist/distribution.hpp"
#include "opde/dist/keypoint_features.hpp"
#include "opde/geometry/nn_index.hpp"
#include "opde/geometry/sample_grid.hpp"
#include "opde/nn/autodiff.hpp"
#include "opde/pipeline/pose_model.hpp"

namespace opde::pipeline {

/// A cloud expressed in the initial-pose object frame, normalized by the
/// object radius and resampled to the model's point count, with the lookup
/// structures the network needs.
struct PreparedCloud {
  geometry::PointCloud cloud;
  nn::Matrix<float> features;  // n x 6
  std::vector<int> knn;        // n x k, empty for omit-features models
  std::shared_ptr<const geometry::NNIndex> index;
};

/// Wall-clock milliseconds spent in each stage of one estimate.
struct StageTimings {
  double preprocess_ms = 0.0;  // crop, normalize, resample
  double encode_ms = 0.0;      // neighbor graph and per-point encoder
  double nn_ms = 0.0;          // index build and keypoint lookup
  double aggregate_ms = 0.0;   // h_x, h_f, h_hat
  double head_ms = 0.0;        // scoring head and softmax

  double scoring_ms() const { return encode_ms + nn_ms + aggregate_ms + head_ms; }
};

/// Crops `camera_cloud` around the initial pose and maps it into the
/// normalized initial-pose object frame. `init_pose` maps object to camera
/// coordinates. Throws EmptyCropError when no point is near the pose.
PreparedCloud prepare_cloud(const PoseModel& model, const geometry::PointCloud& camera_cloud,
                            const geometry::RigidTransform& init_pose, std::mt19937_64& rng,
                            StageTimings* timings = nullptr);

/// Records the full scoring network on `g` and returns the n_samples x 1
/// scores. Dropout is active when `rng` is given.
nn::Var forward_scores(nn::Graph<float>& g, PoseModel& model, const PreparedCloud& input,
                       const geometry::SampleGrid& grid, std::mt19937_64* rng = nullptr,
                       StageTimings* timings = nullptr);

/// Inference wrapper holding a model and its identity-based sample grid.
class Estimator {
 public:
  explicit Estimator(PoseModel model);

  const PoseModel& model() const { return model_; }
  const geometry::SampleGrid& grid() const { return grid_; }

  /// Un-normalized log-probabilities in SampleGrid order.
  Eigen::VectorXd log_scores(const PreparedCloud& input, StageTimings* timings = nullptr) const;

  /// Distribution over the candidates R_y R_z applied around `init_pose`.
  /// `seed` drives the resampling to a fixed point count.
  dist::PoseDistribution estimate(const geometry::PointCloud& camera_cloud, const geometry::RigidTransform& init_pose,
                                  std::uint64_t seed = 0, StageTimings* timings = nullptr) const;

 private:
  mutable PoseModel model_;  // the graph binds parameters by non-const reference
  geometry::SampleGrid grid_;
};

}  // namespace opde::pipeline
