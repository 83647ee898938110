#include "opde/eval/simulate.hpp"

#include <optional>

#include "opde/error.hpp"

namespace opde::eval {

using geometry::Mat3;
using geometry::RigidTransform;
using geometry::Vec3;

namespace {

// Part lying along the bin's x axis with its feature side facing the camera.
Mat3 canonical_rotation() {
  Mat3 r;
  r.col(0) = Vec3(0, 0, -1);
  r.col(1) = Vec3(0, 1, 0);
  r.col(2) = Vec3(1, 0, 0);
  return r;
}

std::optional<RigidTransform> place(const synth::BinWorld& world, const std::vector<RigidTransform>& poses,
                                    std::size_t self, const Mat3& rotation, std::mt19937_64& rng, int attempts) {
  const auto& opt = world.options();
  const double half = 0.5 * opt.bin.inner_width;
  std::uniform_real_distribution<double> xy(-half, half);
  std::uniform_real_distribution<double> z(opt.bin.floor_z - opt.drop_height, opt.bin.floor_z - world.object().radius);
  for (int i = 0; i < attempts; ++i) {
    const RigidTransform pose(rotation, Vec3(xy(rng), xy(rng), z(rng)));
    if (!world.collides(pose, poses, self)) return pose;
  }
  return std::nullopt;
}

struct View {
  std::size_t object = 0;
  synth::GridBin target;
  dist::PolicyDecision decision;
};

}  // namespace

BinPickState simulate_bin_picking(const synth::BinWorld& world, const ViewScorer& scorer,
                                  const SimulationConfig& config) {
  if (config.objects < 1 || config.target_insertions < 1 || config.step_budget < 1) {
    throw DomainError("simulate_bin_picking: counts must be positive");
  }
  std::mt19937_64 rng(config.seed);
  BinPickState state;
  for (int i = 0; i < config.objects; ++i) {
    const auto pose = world.sample_pose(rng, state.objects, config.placement_attempts);
    if (!pose) throw DataError("simulate_bin_picking: could not place the initial parts");
    state.objects.push_back(*pose);
  }
  std::bernoulli_distribution unusable(config.unusable_grasp_prob);

  while (state.insertions < config.target_insertions && state.grasps < config.step_budget && !state.objects.empty()) {
    ++state.steps;
    const synth::Scene scene = world.render(state.objects);
    std::vector<View> views;
    nlohmann::json seen = nlohmann::json::array();
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
      if (scene.visibilities[i] < config.min_visibility) continue;
      const auto inst = world.render_instance(state.objects, i);
      if (inst.cloud.empty()) continue;
      const auto jit = synth::jitter_pose(state.objects[i], rng, config.jitter);
      View v;
      v.object = i;
      v.target = jit.residual;
      try {
        v.decision = dist::policy_pose(scorer(inst.cloud, jit.t_init, jit.residual), config.policy.cutoff,
                                       config.policy.window_deg);
      } catch (const EmptyCropError&) {
        continue;
      }
      seen.push_back({{"object", i},
                      {"decision", dist::to_string(v.decision.kind)},
                      {"confidence", v.decision.confidence}});
      views.push_back(v);
    }

    std::optional<View> insert;
    std::optional<View> align;
    for (const auto& v : views) {
      if (!v.decision.accepted()) continue;
      if (unusable(rng)) {
        if (!align) align = v;
      } else {
        insert = v;
        break;
      }
    }

    nlohmann::json entry = {{"step", state.steps}, {"views", seen}};
    ++state.grasps;
    if (insert) {
      const bool ok = dist::pose_window_contains(insert->decision, insert->target.reflection,
                                                 insert->target.revolution_deg, config.policy.window_deg);
      ++state.insertions;
      if (!ok) ++state.incorrect_insertions;
      entry["action"] = "insert";
      entry["object"] = insert->object;
      entry["correct"] = ok;
      state.objects.erase(state.objects.begin() + static_cast<std::ptrdiff_t>(insert->object));
      if (config.replenish) {
        if (auto p = world.sample_pose(rng, state.objects, config.placement_attempts)) state.objects.push_back(*p);
      }
    } else if (align) {
      ++state.alignments;
      entry["action"] = "align";
      entry["object"] = align->object;
      // the gripper leaves a few degrees of spin about the part axis
      const double spin = std::normal_distribution<double>(0.0, 5.0)(rng);
      const Mat3 rot = canonical_rotation() * geometry::rot_z(spin);
      if (auto p = place(world, state.objects, align->object, rot, rng, config.placement_attempts)) {
        state.objects[align->object] = *p;
      }
    } else {
      ++state.flips;
      const auto which = std::uniform_int_distribution<std::size_t>(0, state.objects.size() - 1)(rng);
      entry["action"] = "flip";
      entry["object"] = which;
      const Mat3 rot = synth::random_rotation(rng);
      if (auto p = place(world, state.objects, which, rot, rng, config.placement_attempts)) {
        state.objects[which] = *p;
      }
    }
    state.log.push_back(entry);
  }
  state.completed = state.insertions >= config.target_insertions;
  return state;
}

BinPickState simulate_bin_picking(const synth::BinWorld& world, const pipeline::Estimator& estimator,
                                  const SimulationConfig& config) {
  std::uint64_t counter = config.seed * 7919;
  const ViewScorer fn = [&](const geometry::PointCloud& cloud, const RigidTransform& init, const synth::GridBin&) {
    return estimator.estimate(cloud, init, ++counter);
  };
  return simulate_bin_picking(world, fn, config);
}

}  // namespace opde::eval
