#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "opde/error.hpp"
#include "opde/eval/evaluate.hpp"
#include "opde/eval/runtime.hpp"
#include "opde/eval/simulate.hpp"

using namespace opde;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("opde_test_eval_" + name);
  fs::remove_all(p);
  return p;
}

const synth::Dataset& tiny_dataset() {
  static const synth::Dataset ds = [] {
    synth::DatasetConfig c;
    c.object = synth::parse_object_spec("recess");
    c.scenes = 6;
    c.test_scenes = 3;
    c.seed = 8;
    return synth::generate_dataset(c, scratch("data"));
  }();
  return ds;
}

dist::PoseDistribution on_bin(std::size_t index, int n_rev = 360) {
  Eigen::VectorXd s = Eigen::VectorXd::Constant(2 * n_rev, -50.0);
  s[static_cast<Eigen::Index>(index)] = 0.0;
  return dist::normalize(s, n_rev);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Evaluate, OracleIsPerfect) {
  const auto& ds = tiny_dataset();
  const auto report = eval::evaluate(ds, [](const auto&, const auto&, const auto&, const synth::GridBin& t) {
    return on_bin(t.index);
  });
  ASSERT_GT(report.reflection.instances, 0u);
  EXPECT_DOUBLE_EQ(report.reflection.coverage(), 1.0);
  EXPECT_DOUBLE_EQ(report.pose.coverage(), 1.0);
  EXPECT_DOUBLE_EQ(*report.reflection.precision(), 1.0);
  EXPECT_DOUBLE_EQ(*report.pose.precision(), 1.0);
}

TEST(Evaluate, UniformRejectsEverything) {
  const auto& ds = tiny_dataset();
  const auto report = eval::evaluate(ds, [](const auto&, const auto&, const auto&, const auto&) {
    return dist::normalize(Eigen::VectorXd::Zero(720));
  });
  EXPECT_DOUBLE_EQ(report.pose.coverage(), 0.0);
  EXPECT_FALSE(report.pose.precision().has_value());
  EXPECT_FALSE(report.reflection.precision().has_value());
  for (const auto& r : report.instances) EXPECT_NEAR(r.reflection_entropy, std::log(2.0), 1e-9);
  const fs::path csv = scratch("report.csv");
  eval::write_report_csv(csv, report);
  const std::string text = slurp(csv);
  EXPECT_EQ(text.rfind("object,task,instances,coverage,precision\n", 0), 0u);
  EXPECT_NE(text.find("N/A"), std::string::npos);
  EXPECT_NE(eval::format_report_table(report).find("coverage"), std::string::npos);
}

TEST(Evaluate, ConfidentlyWrongHasZeroPrecision) {
  const auto& ds = tiny_dataset();
  const auto report = eval::evaluate(ds, [](const auto&, const auto&, const auto&, const synth::GridBin& t) {
    const int ref = 1 - t.reflection;
    return on_bin(static_cast<std::size_t>(ref * 360 + (t.revolution_index + 90) % 360));
  });
  EXPECT_DOUBLE_EQ(report.pose.coverage(), 1.0);
  EXPECT_DOUBLE_EQ(*report.pose.precision(), 0.0);
  EXPECT_DOUBLE_EQ(*report.reflection.precision(), 0.0);
}

TEST(Evaluate, DeterministicPerSeedAndEmptySplitFails) {
  const auto& ds = tiny_dataset();
  auto targets = [&](std::uint64_t seed) {
    std::vector<std::size_t> t;
    const auto r = eval::evaluate(
        ds, [](const auto&, const auto&, const auto&, const auto& b) { return on_bin(b.index); }, {}, seed);
    for (const auto& i : r.instances) t.push_back(i.target.index);
    return t;
  };
  EXPECT_EQ(targets(3), targets(3));
  EXPECT_NE(targets(3), targets(4));
  EXPECT_THROW(eval::evaluate(ds, [](const auto&, const auto&, const auto&, const auto& b) { return on_bin(b.index); },
                              {}, 1, {}, "nosuchsplit"),
               DataError);
  EXPECT_NEAR(eval::binary_entropy(0.5), std::log(2.0), 1e-12);
  EXPECT_EQ(eval::binary_entropy(1.0), 0.0);
}

TEST(Simulate, OracleWithUsableGraspsInsertsEveryTime) {
  const synth::BinWorld world(synth::parse_object_spec("recess"), {});
  eval::SimulationConfig cfg;
  cfg.unusable_grasp_prob = 0.0;
  const auto st = eval::simulate_bin_picking(
      world, [](const auto&, const auto&, const synth::GridBin& t) { return on_bin(t.index); }, cfg);
  EXPECT_TRUE(st.completed);
  EXPECT_EQ(st.insertions, 10);
  EXPECT_EQ(st.incorrect_insertions, 0);
  EXPECT_EQ(st.grasps, st.insertions);
  EXPECT_EQ(st.flips + st.alignments, 0);
  EXPECT_EQ(st.log.size(), static_cast<std::size_t>(st.steps));
}

TEST(Simulate, OracleWithUnusableGraspsAligns) {
  const synth::BinWorld world(synth::parse_object_spec("recess"), {});
  eval::SimulationConfig cfg;
  cfg.unusable_grasp_prob = 0.9;
  cfg.step_budget = 300;
  cfg.seed = 3;
  const auto st = eval::simulate_bin_picking(
      world, [](const auto&, const auto&, const synth::GridBin& t) { return on_bin(t.index); }, cfg);
  EXPECT_TRUE(st.completed);
  EXPECT_EQ(st.incorrect_insertions, 0);
  EXPECT_GT(st.alignments, 0);
  EXPECT_EQ(st.grasps, st.insertions + st.alignments + st.flips);
}

TEST(Simulate, AlwaysRejectRunsOutOfBudget) {
  const synth::BinWorld world(synth::parse_object_spec("recess"), {});
  eval::SimulationConfig cfg;
  cfg.step_budget = 12;
  const auto st = eval::simulate_bin_picking(
      world, [](const auto&, const auto&, const auto&) { return dist::normalize(Eigen::VectorXd::Zero(720)); }, cfg);
  EXPECT_FALSE(st.completed);
  EXPECT_EQ(st.insertions, 0);
  EXPECT_EQ(st.grasps, 12);
  EXPECT_EQ(st.flips, 12);
}

TEST(Simulate, WrongButConfidentInsertsIncorrectly) {
  const synth::BinWorld world(synth::parse_object_spec("recess"), {});
  eval::SimulationConfig cfg;
  cfg.unusable_grasp_prob = 0.0;
  cfg.target_insertions = 3;
  const auto st = eval::simulate_bin_picking(
      world,
      [](const auto&, const auto&, const synth::GridBin& t) {
        return on_bin(static_cast<std::size_t>((1 - t.reflection) * 360 + t.revolution_index));
      },
      cfg);
  EXPECT_EQ(st.incorrect_insertions, 3);
}

TEST(Runtime, StagesArePositiveAndCumulative) {
  const auto& ds = tiny_dataset();
  nn::ModelConfig c;
  c.n_points = 512;
  const auto model = pipeline::make_pose_model(c, ds.config.object, 1);
  const pipeline::Estimator est(model);
  const auto& rec = ds.instances.front();
  const auto rep = eval::runtime_bench(est, ds.root / rec.cloud_path, rec.gt_pose, 3);
  ASSERT_EQ(rep.stages.size(), 5u);
  EXPECT_EQ(rep.stages[0].name, "Loading point cloud");
  EXPECT_EQ(rep.stages[4].name, "Model head");
  double prev = 0.0;
  for (const auto& s : rep.stages) {
    EXPECT_GT(s.median_ms, 0.0) << s.name;
    EXPECT_GE(s.cumulative_ms, prev);
    prev = s.cumulative_ms;
  }
  EXPECT_GT(rep.grid_ms, 0.0);
  EXPECT_GT(rep.scoring_ms, 0.0);
  EXPECT_NE(eval::format_runtime_table(rep).find("Nearest neighbor"), std::string::npos);
}
