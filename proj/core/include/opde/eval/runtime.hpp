#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "opde/pipeline/estimator.hpp"

namespace opde::eval {

struct StageTiming {
  std::string name;
  double median_ms = 0.0;
  double cumulative_ms = 0.0;
};

struct RuntimeReport {
  int repeats = 0;
  std::vector<StageTiming> stages;  // load, encoding, nearest neighbor, aggregator, head
  double grid_ms = 0.0;             // building the sample grid, reported apart
  double scoring_ms = 0.0;          // median of encoding + NN + aggregator + head per run
  double total_ms = 0.0;            // median of the whole pass
};

/// Median-of-`repeats` stage timings of one full estimate on the cloud stored
/// at `cloud_path` (ASCII PLY, camera frame). One untimed warm-up run is made
/// first.
RuntimeReport runtime_bench(const pipeline::Estimator& estimator, const std::filesystem::path& cloud_path,
                            const geometry::RigidTransform& init_pose, int repeats = 31);

std::string format_runtime_table(const RuntimeReport& report);

}  // namespace opde::eval
