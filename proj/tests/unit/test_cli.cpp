#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "opde/dist/distribution.hpp"
#include "opde/synth/dataset.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "opde_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(OPDE_TOOL_PATH) + " " + args + " > " + (work() / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string last_log() {
  std::ifstream in(work() / "last.log");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// synth + untrained model, shared by the tests below
void prepare() {
  static bool done = false;
  if (done) return;
  const std::string w = work().string();
  ASSERT_EQ(run("synth --object recess --scenes 4 --test-scenes 2 --seed 3 --out " + w + "/data"), 0) << last_log();
  ASSERT_EQ(run("train --data " + w + "/data --out " + w + "/model --epochs 0"), 0) << last_log();
  done = true;
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("fly"), 1);
  EXPECT_EQ(run("synth --scenes 3"), 1);  // --out missing
  EXPECT_EQ(run("train --data x --ablation sideways"), 1);
  EXPECT_NE(last_log().find("usage error"), std::string::npos);
}

TEST(Cli, DataErrorsExitTwo) {
  const std::string w = work().string();
  EXPECT_EQ(run("eval --data " + w + "/missing --weights " + w + "/none.opde"), 2);
  EXPECT_EQ(run("plot --in " + w + "/missing.csv --out " + w + "/x.svg"), 2);
  EXPECT_EQ(last_log().find('\n'), last_log().size() - 1);  // one-line diagnostic
}

TEST(Cli, TrainZeroEpochsWritesCheckpoint) {
  prepare();
  EXPECT_TRUE(fs::exists(work() / "model" / "best.opde"));
  EXPECT_TRUE(fs::exists(work() / "model" / "run_config.json"));
}

TEST(Cli, InferWritesNormalizedDistributionAndPlot) {
  prepare();
  const std::string w = work().string();
  const auto ds = opde::synth::load_dataset(work() / "data");
  const auto& rec = ds.instances.front();
  const std::string csv = w + "/dist.csv";
  ASSERT_EQ(run("infer --weights " + w + "/model/best.opde --cloud " + (ds.root / rec.cloud_path).string() +
                " --init " + (ds.root / rec.pose_path).string() + " --out " + csv),
            0)
      << last_log();
  const auto d = opde::dist::read_distribution_csv_file(csv);
  EXPECT_EQ(d.size(), 720u);
  EXPECT_NEAR(d.probs.sum(), 1.0, 1e-6);
  ASSERT_EQ(run("plot --in " + csv + " --out " + w + "/dist.svg"), 0) << last_log();
  std::ifstream svg(w + "/dist.svg");
  std::stringstream ss;
  ss << svg.rdbuf();
  EXPECT_NE(ss.str().find("<svg"), std::string::npos);
  EXPECT_NE(ss.str().find("stroke-dasharray"), std::string::npos);
  EXPECT_EQ(run("infer --weights " + w + "/model/best.opde --cloud " + (ds.root / rec.cloud_path).string() +
                " --init " + (ds.root / rec.pose_path).string() + " --grid-revolutions 180"),
            1);
}

TEST(Cli, EvalUntrainedCoversNothing) {
  prepare();
  const std::string w = work().string();
  ASSERT_EQ(run("eval --data " + w + "/data --weights " + w + "/model/best.opde --out " + w + "/eval"), 0)
      << last_log();
  std::ifstream in(w + "/eval/report.csv");
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "object,task,instances,coverage,precision");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_NE(line.find(",0.0,N/A"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 2);
}
