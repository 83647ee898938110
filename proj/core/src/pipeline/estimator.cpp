#include "opde/pipeline/estimator.hpp"

#include <chrono>

#include "opde/dist/aggregator.hpp"
#include "opde/geometry/preprocess.hpp"
#include "opde/nn/encoder.hpp"

namespace opde::pipeline {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

PreparedCloud prepare_cloud(const PoseModel& model, const geometry::PointCloud& camera_cloud,
                            const geometry::RigidTransform& init_pose, std::mt19937_64& rng, StageTimings* timings) {
  Stopwatch clock;
  PreparedCloud out;
  const auto local = geometry::transformed(camera_cloud, init_pose.inverse());
  out.cloud = geometry::normalize_and_crop(local, geometry::Vec3::Zero(), model.radius(), model.crop_factor, rng,
                                           static_cast<std::size_t>(model.config.n_points));
  out.features = geometry::to_features(out.cloud);
  if (timings) timings->preprocess_ms += clock.lap_ms();
  if (model.config.uses_features()) {
    out.index = std::make_shared<geometry::NNIndex>(out.cloud.positions);
    out.knn = out.index->knn_graph(model.config.k_neighbors);
    if (timings) timings->encode_ms += clock.lap_ms();
  }
  return out;
}

nn::Var forward_scores(nn::Graph<float>& g, PoseModel& model, const PreparedCloud& input,
                       const geometry::SampleGrid& grid, std::mt19937_64* rng, StageTimings* timings) {
  Stopwatch clock;
  std::optional<nn::Var> embeddings;
  if (model.config.uses_features()) {
    embeddings = nn::encode_points(g, model.params, model.config, input.features, input.knn);
  }
  if (timings) timings->encode_ms += clock.lap_ms();

  auto index = input.index;
  if (!index) index = std::make_shared<geometry::NNIndex>(input.cloud.positions);
  const auto pack = dist::extract_keypoint_features(*index, model.normalized_keypoints(), grid);
  if (timings) timings->nn_ms += clock.lap_ms();

  const nn::Var fused = dist::aggregate_keypoints(g, model.params, model.config, embeddings, pack);
  if (timings) timings->aggregate_ms += clock.lap_ms();

  const nn::Var scores = dist::score_head(g, model.params, model.config, fused, pack.n_samples, rng);
  if (timings) timings->head_ms += clock.lap_ms();
  return scores;
}

Estimator::Estimator(PoseModel model)
    : model_(std::move(model)), grid_(geometry::RigidTransform::identity(), model_.config.n_revolution) {}

Eigen::VectorXd Estimator::log_scores(const PreparedCloud& input, StageTimings* timings) const {
  nn::Graph<float> g(false);
  const nn::Var s = forward_scores(g, model_, input, grid_, nullptr, timings);
  return Eigen::Map<const Eigen::VectorXf>(g.value(s).data(), g.value(s).size()).cast<double>();
}

dist::PoseDistribution Estimator::estimate(const geometry::PointCloud& camera_cloud,
                                           const geometry::RigidTransform& init_pose, std::uint64_t seed,
                                           StageTimings* timings) const {
  std::mt19937_64 rng(seed);
  const PreparedCloud input = prepare_cloud(model_, camera_cloud, init_pose, rng, timings);
  const Eigen::VectorXd scores = log_scores(input, timings);
  const auto start = std::chrono::steady_clock::now();
  auto d = dist::normalize(scores, model_.config.n_revolution);
  if (timings) timings->head_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return d;
}

}  // namespace opde::pipeline
