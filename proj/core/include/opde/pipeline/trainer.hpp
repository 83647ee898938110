#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>

#include <nlohmann/json_fwd.hpp>

#include "opde/nn/adam.hpp"
#include "opde/pipeline/estimator.hpp"
#include "opde/synth/augment.hpp"
#include "opde/synth/dataset.hpp"

namespace opde::pipeline {

struct TrainConfig {
  int epochs = 200;
  int batches_per_epoch = 100;
  int batch_size = 1;
  nn::AdamConfig adam{1e-3};
  double final_lr_fraction = 0.1;  // cosine decay of the step size down to lr * this
  // The first batches only draw views where the symmetry-breaking feature is
  // clearly visible. Without this the network never leaves the uniform
  // solution: most views carry no evidence, and their noise drowns the rest.
  int warmup_batches = 600;
  std::size_t warmup_min_feature_pixels = 40;
  // after warm-up, share of batches still drawn from those views
  double feature_view_fraction = 0.5;
  std::uint64_t seed = 1;
  int checkpoint_every = 10;    // epochs; 0 disables periodic checkpoints
  int validation_size = 32;     // train-split instances held out for model selection
  bool augment = true;          // depth augmentation on training clouds
  synth::JitterConfig jitter;
  synth::DepthAugmentConfig depth;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// One jittered, augmented and normalized view with its target bin.
struct TrainingExample {
  PreparedCloud input;
  synth::GridBin target;
};

/// Jitters `gt_pose`, optionally augments the depth data and prepares the
/// cloud around the jittered pose. Throws EmptyCropError when the jittered
/// crop is empty.
TrainingExample make_training_example(const PoseModel& model, const geometry::PointCloud& camera_cloud,
                                      const geometry::RigidTransform& gt_pose, std::mt19937_64& rng,
                                      const synth::JitterConfig& jitter,
                                      const synth::DepthAugmentConfig* depth = nullptr);

/// Forward + backward for one example. Gradients accumulate into
/// model.params (scaled by `weight`); returns the InfoNCE loss.
double accumulate_gradients(PoseModel& model, const geometry::SampleGrid& grid, const TrainingExample& example,
                            std::mt19937_64& rng, float weight = 1.0f);

struct EpochReport {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double seconds = 0.0;
  bool improved = false;
  int skipped = 0;  // examples dropped for an empty crop
};

struct TrainResult {
  PoseModel final_model;
  PoseModel best_model;
  nn::AdamState<float> optimizer;
  std::vector<EpochReport> history;
};

/// Trains on the dataset's train split with Adam and InfoNCE. When `out_dir`
/// is non-empty it receives checkpoint.opde / checkpoint.adam every
/// `checkpoint_every` epochs, best.opde on each validation improvement, and
/// model.opde / model.adam plus train_log.csv at the end. Throws
/// NumericalError when a loss or gradient becomes non-finite.
TrainResult train(PoseModel model, const synth::Dataset& data, const TrainConfig& config,
                  const std::filesystem::path& out_dir = {},
                  const std::function<void(const EpochReport&)>& on_epoch = {},
                  std::optional<nn::AdamState<float>> resume = std::nullopt);

}  // namespace opde::pipeline
