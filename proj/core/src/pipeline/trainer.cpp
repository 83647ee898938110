#include "opde/pipeline/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "opde/error.hpp"

namespace opde::pipeline {

nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batches_per_epoch", c.batches_per_epoch},
          {"batch_size", c.batch_size},
          {"lr", c.adam.lr},
          {"final_lr_fraction", c.final_lr_fraction},
          {"warmup_batches", c.warmup_batches},
          {"warmup_min_feature_pixels", c.warmup_min_feature_pixels},
          {"feature_view_fraction", c.feature_view_fraction},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"eps", c.adam.eps},
          {"seed", c.seed},
          {"checkpoint_every", c.checkpoint_every},
          {"validation_size", c.validation_size},
          {"augment", c.augment},
          {"jitter",
           {{"translation_std", c.jitter.translation_std},
            {"tilt_std_deg", c.jitter.tilt_std_deg},
            {"revolution_std_deg", c.jitter.revolution_std_deg},
            {"randomize_symmetry", c.jitter.randomize_symmetry}}},
          {"depth",
           {{"noise_std", c.depth.noise_std},
            {"point_dropout", c.depth.point_dropout},
            {"max_patches", c.depth.max_patches},
            {"patch_min_axis", c.depth.patch_min_axis},
            {"patch_max_axis", c.depth.patch_max_axis}}}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batches_per_epoch = j.at("batches_per_epoch").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.adam.lr = j.at("lr").get<double>();
  c.final_lr_fraction = j.value("final_lr_fraction", c.final_lr_fraction);
  c.warmup_batches = j.value("warmup_batches", c.warmup_batches);
  c.warmup_min_feature_pixels = j.value("warmup_min_feature_pixels", c.warmup_min_feature_pixels);
  c.feature_view_fraction = j.value("feature_view_fraction", c.feature_view_fraction);
  c.adam.beta1 = j.at("beta1").get<double>();
  c.adam.beta2 = j.at("beta2").get<double>();
  c.adam.eps = j.at("eps").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.checkpoint_every = j.at("checkpoint_every").get<int>();
  c.validation_size = j.at("validation_size").get<int>();
  c.augment = j.at("augment").get<bool>();
  const auto& jj = j.at("jitter");
  c.jitter.translation_std = jj.at("translation_std").get<double>();
  c.jitter.tilt_std_deg = jj.at("tilt_std_deg").get<double>();
  c.jitter.revolution_std_deg = jj.at("revolution_std_deg").get<double>();
  c.jitter.randomize_symmetry = jj.at("randomize_symmetry").get<bool>();
  const auto& dj = j.at("depth");
  c.depth.noise_std = dj.at("noise_std").get<double>();
  c.depth.point_dropout = dj.at("point_dropout").get<double>();
  c.depth.max_patches = dj.at("max_patches").get<int>();
  c.depth.patch_min_axis = dj.at("patch_min_axis").get<double>();
  c.depth.patch_max_axis = dj.at("patch_max_axis").get<double>();
  return c;
}

TrainingExample make_training_example(const PoseModel& model, const geometry::PointCloud& camera_cloud,
                                      const geometry::RigidTransform& gt_pose, std::mt19937_64& rng,
                                      const synth::JitterConfig& jitter, const synth::DepthAugmentConfig* depth) {
  synth::JitterConfig jc = jitter;
  jc.n_revolution = model.config.n_revolution;
  const synth::JitterResult j = synth::jitter_pose(gt_pose, rng, jc);
  TrainingExample ex;
  ex.target = j.residual;
  if (depth) {
    synth::DepthAugmentConfig dc = *depth;
    dc.target_points = 0;  // resampled once, during the crop
    ex.input = prepare_cloud(model, synth::augment_depth(camera_cloud, rng, dc), j.t_init, rng);
  } else {
    ex.input = prepare_cloud(model, camera_cloud, j.t_init, rng);
  }
  return ex;
}

double accumulate_gradients(PoseModel& model, const geometry::SampleGrid& grid, const TrainingExample& example,
                            std::mt19937_64& rng, float weight) {
  nn::Graph<float> g(true);
  const nn::Var scores = forward_scores(g, model, example.input, grid, &rng);
  const nn::Var loss = g.infonce(scores, static_cast<Eigen::Index>(example.target.index));
  const double value = g.value(loss)(0, 0);
  if (!std::isfinite(value)) throw NumericalError("training loss is not finite");
  g.backward(loss, weight);
  return value;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint64_t out[1];
  seq.generate(reinterpret_cast<std::uint32_t*>(out), reinterpret_cast<std::uint32_t*>(out) + 2);
  return out[0];
}

}  // namespace

TrainResult train(PoseModel model, const synth::Dataset& data, const TrainConfig& config,
                  const std::filesystem::path& out_dir, const std::function<void(const EpochReport&)>& on_epoch,
                  std::optional<nn::AdamState<float>> resume) {
  if (config.epochs < 0 || config.batches_per_epoch < 1 || config.batch_size < 1) {
    throw DomainError("train: epochs must be >= 0 and batch settings >= 1");
  }
  if (config.final_lr_fraction <= 0.0 || config.final_lr_fraction > 1.0 || config.warmup_batches < 0 ||
      config.feature_view_fraction < 0.0 || config.feature_view_fraction > 1.0) {
    throw DomainError("train: final_lr_fraction must be in (0, 1], warmup_batches >= 0, feature_view_fraction in [0, 1]");
  }
  const auto records = data.split("train");
  if (records.empty() && config.epochs > 0) throw DataError("train: dataset has no training instances");

  // Clouds are small; keep them all in memory.
  std::vector<geometry::PointCloud> clouds;
  clouds.reserve(records.size());
  for (const auto* r : records) clouds.push_back(data.load_cloud(*r));

  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 split_rng(mix_seed(config.seed, 0x5157, 0));
  std::shuffle(order.begin(), order.end(), split_rng);
  const std::size_t n_val =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(config.validation_size, 0)), order.size() / 5);
  const std::vector<std::size_t> val(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  const std::vector<std::size_t> fit(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> showing_feature;
  for (std::size_t i : fit) {
    if (records[i]->feature_pixels >= config.warmup_min_feature_pixels) showing_feature.push_back(i);
  }
  // resumed runs and featureless objects skip the warm-up
  const long warmup = resume || showing_feature.empty() ? 0 : config.warmup_batches;

  const geometry::SampleGrid grid(geometry::RigidTransform::identity(), model.config.n_revolution);
  synth::JitterConfig jitter = config.jitter;

  // Validation views are fixed: one jitter per held-out instance, no depth augmentation.
  std::vector<TrainingExample> val_examples;
  for (std::size_t v : val) {
    std::mt19937_64 rng(mix_seed(config.seed, 0x7A1, v));
    try {
      val_examples.push_back(make_training_example(model, clouds[v], records[v]->gt_pose, rng, jitter));
    } catch (const EmptyCropError&) {
    }
  }
  auto validation_loss = [&]() {
    if (val_examples.empty()) return std::numeric_limits<double>::quiet_NaN();
    Estimator est(model);
    double total = 0.0;
    for (const auto& ex : val_examples) total += dist::infonce_loss(est.log_scores(ex.input), ex.target.index);
    return total / static_cast<double>(val_examples.size());
  };

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  std::ofstream log;
  if (!out_dir.empty()) {
    log.open(out_dir / "train_log.csv");
    log << "epoch,train_loss,validation_loss,seconds,skipped\n";
  }

  TrainResult result;
  result.optimizer = resume.value_or(nn::AdamState<float>{});
  double best = std::numeric_limits<double>::infinity();
  result.best_model = model;

  std::mt19937_64 rng(mix_seed(config.seed, 0x7EA1, 1));
  const float inv_batch = 1.0f / static_cast<float>(config.batch_size);
  const long total_batches = static_cast<long>(config.epochs) * config.batches_per_epoch;
  long batch_index = 0;
  nn::AdamConfig adam = config.adam;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochReport rep;
    rep.epoch = epoch;
    double loss_sum = 0.0;
    int loss_count = 0;
    for (int b = 0; b < config.batches_per_epoch; ++b, ++batch_index) {
      const bool favour = !showing_feature.empty() &&
                          (batch_index < warmup || std::bernoulli_distribution(config.feature_view_fraction)(rng));
      const auto& pool = favour ? showing_feature : fit;
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const double progress = static_cast<double>(batch_index) / static_cast<double>(total_batches);
      adam.lr = config.adam.lr * (config.final_lr_fraction +
                                  (1.0 - config.final_lr_fraction) * 0.5 * (1.0 + std::cos(M_PI * progress)));
      model.params.zero_grad();
      int used = 0;
      for (int s = 0; s < config.batch_size; ++s) {
        const std::size_t i = pool[pick(rng)];
        TrainingExample ex;
        try {
          ex = make_training_example(model, clouds[i], records[i]->gt_pose, rng, jitter,
                                     config.augment ? &config.depth : nullptr);
        } catch (const EmptyCropError&) {
          ++rep.skipped;
          continue;
        }
        loss_sum += accumulate_gradients(model, grid, ex, rng, inv_batch);
        ++loss_count;
        ++used;
      }
      if (used > 0) nn::adam_step(model.params.tensors(), result.optimizer, adam);
    }
    rep.train_loss = loss_count > 0 ? loss_sum / loss_count : std::numeric_limits<double>::quiet_NaN();
    rep.validation_loss = validation_loss();
    const double score = std::isnan(rep.validation_loss) ? rep.train_loss : rep.validation_loss;
    if (score < best) {
      best = score;
      rep.improved = true;
      result.best_model = model;
      if (!out_dir.empty()) save_pose_model(out_dir / "best.opde", model);
    }
    if (!out_dir.empty() && config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0) {
      save_pose_model(out_dir / "checkpoint.opde", model);
      save_optimizer_state(out_dir / "checkpoint.adam", model.params, result.optimizer);
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (log.is_open()) {
      log << rep.epoch << ',' << rep.train_loss << ',' << rep.validation_loss << ',' << rep.seconds << ','
          << rep.skipped << '\n';
      log.flush();
    }
    result.history.push_back(rep);
    if (on_epoch) on_epoch(rep);
  }
  if (!out_dir.empty()) {
    save_pose_model(out_dir / "model.opde", model);
    save_optimizer_state(out_dir / "model.adam", model.params, result.optimizer);
    if (config.epochs == 0) save_pose_model(out_dir / "best.opde", model);
  }
  result.final_model = std::move(model);
  return result;
}

}  // namespace opde::pipeline
