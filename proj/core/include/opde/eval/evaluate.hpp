#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opde/dist/policy.hpp"
#include "opde/pipeline/estimator.hpp"
#include "opde/synth/augment.hpp"
#include "opde/synth/dataset.hpp"

namespace opde::eval {

struct PolicyConfig {
  double cutoff = 0.99;
  double window_deg = 15.0;
};

/// Accepted / correct counts for one task.
struct TaskStats {
  std::size_t instances = 0;
  std::size_t accepted = 0;
  std::size_t correct = 0;

  double coverage() const { return instances ? static_cast<double>(accepted) / static_cast<double>(instances) : 0.0; }
  /// Empty when nothing was accepted (reported as N/A).
  std::optional<double> precision() const {
    if (accepted == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(accepted);
  }
};

struct InstanceResult {
  int scene = 0;
  int object = 0;
  std::size_t feature_pixels = 0;
  synth::GridBin target;
  dist::PolicyDecision reflection;
  dist::PolicyDecision pose;
  bool reflection_correct = false;
  bool pose_correct = false;
  double reflection_entropy = 0.0;  // of the two-row marginal, nats
  double revolution_entropy = 0.0;  // of the 360-bin marginal, nats
  bool skipped = false;             // empty crop around the initial pose
};

struct EvalReport {
  std::string object;
  PolicyConfig policy;
  TaskStats reflection;
  TaskStats pose;
  std::vector<InstanceResult> instances;
};

/// Scores one view: cloud in camera coordinates and the initial object pose.
using DistributionFn = std::function<dist::PoseDistribution(const geometry::PointCloud& cloud,
                                                            const geometry::RigidTransform& init_pose,
                                                            const synth::InstanceRecord& record,
                                                            const synth::GridBin& target)>;

/// Runs both policies on every instance of `split`. Each instance gets a
/// seeded jittered initial pose; the target is the bin undoing the jitter.
/// A reflection decision is correct when it names the target reflection, a
/// pose decision when its window also contains the target angle. Instances
/// whose crop is empty count as rejected. Throws DataError when the split is
/// empty.
EvalReport evaluate(const synth::Dataset& data, const DistributionFn& scorer, const PolicyConfig& policy = {},
                    std::uint64_t seed = 1, const synth::JitterConfig& jitter = {},
                    const std::string& split = "test", int n_revolution = 360);
EvalReport evaluate(const synth::Dataset& data, const pipeline::Estimator& estimator, const PolicyConfig& policy = {},
                    std::uint64_t seed = 1, const synth::JitterConfig& jitter = {},
                    const std::string& split = "test");

/// Columns object,task,instances,coverage,precision; percentages, N/A when
/// nothing was accepted.
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);
/// Human-readable table.
std::string format_report_table(const EvalReport& report);
/// Per-instance details as CSV.
void write_instances_csv(const std::filesystem::path& path, const EvalReport& report);

double binary_entropy(double p);

}  // namespace opde::eval
