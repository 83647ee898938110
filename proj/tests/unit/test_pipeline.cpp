#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "checks.hpp"
#include "opde/error.hpp"
#include "opde/nn/adam.hpp"
#include "opde/nn/encoder.hpp"
#include "opde/nn/weights_io.hpp"
#include "opde/pipeline/trainer.hpp"

using namespace opde;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("opde_test_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

nn::ModelConfig small_config() {
  nn::ModelConfig c;
  c.n_points = 256;
  c.k_neighbors = 8;
  c.n_keypoints = 8;
  c.n_revolution = 36;
  c.feature_dim = 16;
  c.edge_hidden = 8;
  c.point_hidden = 16;
  c.aggregator_dim = 16;
  c.head_hidden = 32;
  return c;
}

// One shared tiny dataset for the tests that need rendered views.
const synth::Dataset& tiny_dataset() {
  static const synth::Dataset ds = [] {
    synth::DatasetConfig c;
    c.object = synth::parse_object_spec("recess");
    c.scenes = 4;
    c.test_scenes = 1;
    c.seed = 5;
    return synth::generate_dataset(c, scratch("data"));
  }();
  return ds;
}

}  // namespace

TEST(Checks, GridSoftmaxOracleGradient) {
  const auto grid = checks::grid_check();
  EXPECT_TRUE(grid.pass) << grid.detail;
  const auto soft = checks::softmax_check(2000);
  EXPECT_TRUE(soft.pass) << soft.detail;
  const auto oracle = checks::keypoint_oracle_check(2);
  EXPECT_TRUE(oracle.pass) << oracle.detail;
  const auto grad = checks::gradient_check(60);
  EXPECT_TRUE(grad.pass) << grad.detail;
}

TEST(ModelLayout, AblationsDropTheirBranches) {
  nn::ModelConfig c = small_config();
  const auto full = nn::parameter_layout(c);
  c.ablation = nn::Ablation::omit_features;
  const auto no_feat = nn::parameter_layout(c);
  c.ablation = nn::Ablation::omit_spatial;
  const auto no_spatial = nn::parameter_layout(c);
  auto has = [](const std::vector<nn::TensorShape>& l, const std::string& prefix) {
    return std::any_of(l.begin(), l.end(), [&](const auto& t) { return t.name.starts_with(prefix); });
  };
  EXPECT_TRUE(has(full, "encoder.") && has(full, "aggregator.hx") && has(full, "aggregator.hf"));
  EXPECT_FALSE(has(no_feat, "encoder.") || has(no_feat, "aggregator.hf"));
  EXPECT_FALSE(has(no_spatial, "aggregator.hx"));
  EXPECT_TRUE(has(no_spatial, "encoder."));
  EXPECT_EQ(nn::parse_ablation("omit-spatial"), nn::Ablation::omit_spatial);
  EXPECT_THROW(nn::parse_ablation("nope"), DomainError);

  auto params = nn::ModelParams<float>::initialize(small_config(), 1);
  nn::Graph<float> g;
  nn::Matrix<float> wrong = nn::Matrix<float>::Zero(10, 6);
  EXPECT_THROW(nn::encode_points(g, params, small_config(), wrong, std::vector<int>(80, 0)), ShapeError);
}

TEST(WeightsIo, RoundTripAndCorruption) {
  nn::TensorFile f;
  f.metadata = {{"kind", "test"}, {"x", 3}};
  f.tensors.push_back({"a", nn::Matrix<float>::Random(3, 4), {}});
  f.tensors.push_back({"b.c", nn::Matrix<float>::Random(1, 7), {}});
  const fs::path p = scratch("w.opde");
  nn::write_tensor_file(p, f);
  const nn::TensorFile back = nn::read_tensor_file(p);
  EXPECT_EQ(back.metadata, f.metadata);
  ASSERT_EQ(back.tensors.size(), 2u);
  ASSERT_NE(back.find("b.c"), nullptr);
  EXPECT_EQ(back.find("b.c")->value, f.tensors[1].value);
  EXPECT_EQ(back.find("nothing"), nullptr);

  const auto size = fs::file_size(p);
  fs::resize_file(p, size - 5);
  EXPECT_THROW(nn::read_tensor_file(p), DataError);
  {
    std::ofstream out(p, std::ios::binary);
    out << "JUNKJUNKJUNK";
  }
  EXPECT_THROW(nn::read_tensor_file(p), DataError);
  EXPECT_THROW(nn::read_tensor_file(scratch("absent.opde")), DataError);
  fs::remove(p);
}

TEST(Adam, MinimizesQuadraticAndGuardsNonFinite) {
  std::vector<nn::Parameter<double>> ps{{"x", nn::Matrix<double>::Constant(1, 2, 3.0), {}}};
  nn::AdamState<double> st;
  nn::AdamConfig cfg;
  cfg.lr = 0.1;
  ps[0].grad = 2.0 * ps[0].value;
  nn::adam_step(ps, st, cfg);
  EXPECT_NEAR(ps[0].value(0, 0), 2.9, 1e-6);  // first step moves by lr
  for (int i = 0; i < 500; ++i) {
    ps[0].grad = 2.0 * ps[0].value;
    nn::adam_step(ps, st, cfg);
  }
  EXPECT_LT(ps[0].value.cwiseAbs().maxCoeff(), 0.05);
  const auto before = ps[0].value;
  ps[0].grad(0, 1) = std::nan("");
  EXPECT_THROW(nn::adam_step(ps, st, cfg), NumericalError);
  EXPECT_EQ(ps[0].value, before);
}

TEST(PoseModel, SaveLoadKeepsScores) {
  const auto& ds = tiny_dataset();
  const auto model = pipeline::make_pose_model(small_config(), ds.config.object, 3);
  EXPECT_EQ(model.keypoints.rows(), 8);
  const fs::path p = scratch("m.opde");
  pipeline::save_pose_model(p, model);
  const auto back = pipeline::load_pose_model(p);
  EXPECT_EQ(back.config.n_revolution, 36);
  EXPECT_EQ(back.keypoints, model.keypoints);

  const auto& rec = ds.instances.front();
  const auto cloud = ds.load_cloud(rec);
  const pipeline::Estimator a(model), b(back);
  const auto da = a.estimate(cloud, rec.gt_pose, 9);
  const auto db = b.estimate(cloud, rec.gt_pose, 9);
  ASSERT_EQ(da.size(), 72u);
  EXPECT_NEAR(da.probs.sum(), 1.0, 1e-9);
  EXPECT_LT((da.probs - db.probs).cwiseAbs().maxCoeff(), 1e-7);

  nn::AdamState<float> st;
  auto params = model.params;
  for (auto& t : params.tensors()) t.grad.setConstant(0.5f);
  nn::adam_step(params.tensors(), st, {});
  const fs::path pa = scratch("m.adam");
  pipeline::save_optimizer_state(pa, params, st);
  const auto st2 = pipeline::load_optimizer_state(pa, params);
  EXPECT_EQ(st2.step, 1);
  EXPECT_EQ(st2.v.back(), st.v.back());

  // tensors and stored configuration must agree
  nn::TensorFile f = nn::read_tensor_file(p);
  f.tensors.pop_back();
  nn::write_tensor_file(p, f);
  EXPECT_THROW(pipeline::load_pose_model(p), DataError);
}

TEST(Estimator, EmptyCropIsReported) {
  const auto& ds = tiny_dataset();
  const auto model = pipeline::make_pose_model(small_config(), ds.config.object, 3);
  const pipeline::Estimator est(model);
  const auto cloud = ds.load_cloud(ds.instances.front());
  const auto far = geometry::RigidTransform::from_translation(geometry::Vec3(1, 1, 1));
  EXPECT_THROW(est.estimate(cloud, far), EmptyCropError);
}

TEST(Trainer, ZeroEpochsWritesInitialModel) {
  const auto& ds = tiny_dataset();
  const auto model = pipeline::make_pose_model(small_config(), ds.config.object, 3);
  pipeline::TrainConfig tc;
  tc.epochs = 0;
  const fs::path out = scratch("train0");
  pipeline::train(model, ds, tc, out);
  ASSERT_TRUE(fs::exists(out / "best.opde"));
  EXPECT_TRUE(fs::exists(out / "model.opde"));
  const auto back = pipeline::load_pose_model(out / "best.opde");
  EXPECT_EQ(back.params.tensors().front().value, model.params.tensors().front().value);
}

TEST(Trainer, FewStepsAreDeterministicAndCheckpoint) {
  const auto& ds = tiny_dataset();
  const auto model = pipeline::make_pose_model(small_config(), ds.config.object, 3);
  pipeline::TrainConfig tc;
  tc.epochs = 2;
  tc.batches_per_epoch = 3;
  tc.checkpoint_every = 1;
  tc.adam.lr = 1e-3;
  const fs::path out = scratch("train1");
  const auto r1 = pipeline::train(model, ds, tc, out);
  const auto r2 = pipeline::train(model, ds, tc);
  ASSERT_EQ(r1.history.size(), 2u);
  for (const auto& e : r1.history) EXPECT_TRUE(std::isfinite(e.train_loss));
  EXPECT_EQ(r1.final_model.params.tensors().back().value, r2.final_model.params.tensors().back().value);
  EXPECT_NE(r1.final_model.params.tensors().back().value, model.params.tensors().back().value);
  EXPECT_EQ(r1.optimizer.step, 6);
  EXPECT_TRUE(fs::exists(out / "checkpoint.adam"));

  const auto json = pipeline::to_json(tc);
  EXPECT_EQ(pipeline::train_config_from_json(json).batches_per_epoch, 3);
}

TEST(Trainer, TrainingExampleTargetsResidualBin) {
  const auto& ds = tiny_dataset();
  const auto model = pipeline::make_pose_model(small_config(), ds.config.object, 3);
  const auto& rec = ds.instances.front();
  std::mt19937_64 rng(1);
  synth::JitterConfig jc = synth::JitterConfig::none();
  jc.forced_revolution_deg = 50.0;
  const auto ex = pipeline::make_training_example(model, ds.load_cloud(rec), rec.gt_pose, rng, jc);
  EXPECT_EQ(ex.input.cloud.size(), 256u);
  EXPECT_EQ(ex.target.reflection, 0);
  // undoing +50 degrees on a 10 degree grid
  EXPECT_EQ(ex.target.revolution_index, 31);
}
