#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "opde/eval/evaluate.hpp"
#include "opde/synth/bin_world.hpp"

namespace opde::eval {

struct SimulationConfig {
  int objects = 6;               // parts in the bin at the start
  int target_insertions = 10;
  int step_budget = 100;         // grasps allowed before giving up
  double unusable_grasp_prob = 0.3;
  bool replenish = true;         // drop a new part after each insertion
  std::uint64_t seed = 1;
  PolicyConfig policy;
  synth::JitterConfig jitter;
  double min_visibility = 0.5;
  int placement_attempts = 500;
};

struct BinPickState {
  std::vector<geometry::RigidTransform> objects;  // current ground-truth poses
  int steps = 0;
  int grasps = 0;
  int flips = 0;
  int alignments = 0;
  int insertions = 0;
  int incorrect_insertions = 0;
  bool completed = false;  // reached target_insertions within the budget
  nlohmann::json log = nlohmann::json::array();
};

/// Scores one object view given its camera-frame cloud, the jittered initial
/// pose and (for oracle scorers in tests) the true target bin.
using ViewScorer = std::function<dist::PoseDistribution(const geometry::PointCloud& cloud,
                                                        const geometry::RigidTransform& init_pose,
                                                        const synth::GridBin& target)>;

/// Pick-and-insert loop. Each step estimates every sufficiently visible part;
/// a part with an accepted pose and a usable grasp is inserted (correct when
/// the accepted window holds the true bin), an accepted part whose grasp is
/// unusable is aligned to a canonical orientation, and otherwise a random
/// part is flipped to a random pose. Each grasp is one step.
BinPickState simulate_bin_picking(const synth::BinWorld& world, const ViewScorer& scorer,
                                  const SimulationConfig& config);
BinPickState simulate_bin_picking(const synth::BinWorld& world, const pipeline::Estimator& estimator,
                                  const SimulationConfig& config);

}  // namespace opde::eval
