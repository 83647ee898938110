#include <malloc.h>

#include <random>

#include <benchmark/benchmark.h>

#include "opde/dist/distribution.hpp"
#include "opde/dist/keypoint_features.hpp"
#include "opde/geometry/mesh.hpp"
#include "opde/geometry/nn_index.hpp"
#include "opde/geometry/sample_grid.hpp"
#include "opde/nn/encoder.hpp"
#include "opde/pipeline/estimator.hpp"
#include "opde/synth/object_mesh.hpp"

using namespace opde;

namespace {

// A camera-frame view of the recess part, sampled from its surface.
struct Fixture {
  pipeline::PoseModel model;
  geometry::PointCloud camera_cloud;
  geometry::RigidTransform pose;
  pipeline::PreparedCloud prepared;

  Fixture() {
    model = pipeline::make_pose_model({}, synth::parse_object_spec("recess"), 1);
    std::mt19937_64 rng(1);
    pose = geometry::RigidTransform(geometry::rot_x(35.0), geometry::Vec3(0.0, 0.0, 0.45));
    const auto local = geometry::sample_surface(synth::make_object_mesh(model.object), 6000, rng);
    camera_cloud = geometry::transformed(local, pose);
    prepared = pipeline::prepare_cloud(model, camera_cloud, pose, rng);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_SampleGrid(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(geometry::build_sample_grid(geometry::RigidTransform::identity(), 360));
}
BENCHMARK(BM_SampleGrid)->Unit(benchmark::kMicrosecond);

void BM_NNIndexBuild(benchmark::State& state) {
  const auto& pts = fixture().prepared.cloud.positions;
  for (auto _ : state) benchmark::DoNotOptimize(geometry::NNIndex(pts));
}
BENCHMARK(BM_NNIndexBuild)->Unit(benchmark::kMicrosecond);

void BM_KnnGraph(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(f.prepared.index->knn_graph(20));
}
BENCHMARK(BM_KnnGraph)->Unit(benchmark::kMillisecond);

void BM_KeypointFeatures(benchmark::State& state) {
  const auto& f = fixture();
  const geometry::SampleGrid grid(geometry::RigidTransform::identity(), 360);
  const auto kps = f.model.normalized_keypoints();
  for (auto _ : state) benchmark::DoNotOptimize(dist::extract_keypoint_features(*f.prepared.index, kps, grid));
}
BENCHMARK(BM_KeypointFeatures)->Unit(benchmark::kMillisecond);

void BM_Encoder(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) {
    nn::Graph<float> g(false);
    benchmark::DoNotOptimize(nn::encode_points(g, f.model.params, f.model.config, f.prepared.features, f.prepared.knn));
  }
}
BENCHMARK(BM_Encoder)->Unit(benchmark::kMillisecond);

void BM_FullEstimate(benchmark::State& state) {
  auto& f = fixture();
  const pipeline::Estimator est(f.model);
  for (auto _ : state) benchmark::DoNotOptimize(est.estimate(f.camera_cloud, f.pose, 1));
}
BENCHMARK(BM_FullEstimate)->Unit(benchmark::kMillisecond);

void BM_TrainingStep(benchmark::State& state) {
  auto& f = fixture();
  const geometry::SampleGrid grid(geometry::RigidTransform::identity(), 360);
  std::mt19937_64 rng(2);
  for (auto _ : state) {
    f.model.params.zero_grad();
    nn::Graph<float> g(true);
    const auto scores = pipeline::forward_scores(g, f.model, f.prepared, grid, &rng);
    g.backward(g.infonce(scores, 17));
  }
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond);

void BM_Softmax(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Eigen::VectorXd s(720);
  for (auto& v : s) v = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dist::normalize(s));
}
BENCHMARK(BM_Softmax)->Unit(benchmark::kMicrosecond);

}  // namespace

int main(int argc, char** argv) {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
