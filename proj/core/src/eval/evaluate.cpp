#include "opde/eval/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opde/error.hpp"

namespace opde::eval {

double binary_entropy(double p) {
  double h = 0.0;
  for (double q : {p, 1.0 - p}) {
    if (q > 0.0) h -= q * std::log(q);
  }
  return h;
}

namespace {

double entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

std::uint64_t instance_seed(std::uint64_t seed, int scene, int object) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(scene), static_cast<std::uint32_t>(object), 0xE7A1u};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::string percent(std::optional<double> v) {
  if (!v) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * *v);
  return buf;
}

}  // namespace

EvalReport evaluate(const synth::Dataset& data, const DistributionFn& scorer, const PolicyConfig& policy,
                    std::uint64_t seed, const synth::JitterConfig& jitter, const std::string& split,
                    int n_revolution) {
  const auto records = data.split(split);
  if (records.empty()) throw DataError("evaluate: no instances in split '" + split + "'");
  EvalReport report;
  report.object = synth::to_string(data.config.object.kind);
  report.policy = policy;
  synth::JitterConfig jc = jitter;
  jc.n_revolution = n_revolution;
  for (const auto* rec : records) {
    InstanceResult r;
    r.scene = rec->scene;
    r.object = rec->object;
    r.feature_pixels = rec->feature_pixels;
    std::mt19937_64 rng(instance_seed(seed, rec->scene, rec->object));
    const auto jit = synth::jitter_pose(rec->gt_pose, rng, jc);
    r.target = jit.residual;
    try {
      const auto cloud = data.load_cloud(*rec);
      const auto d = scorer(cloud, jit.t_init, *rec, r.target);
      r.reflection = dist::policy_reflection(d, policy.cutoff);
      r.pose = dist::policy_pose(d, policy.cutoff, policy.window_deg);
      r.reflection_entropy = binary_entropy(d.reflection_mass(0));
      r.revolution_entropy = entropy(d.revolution_marginal());
    } catch (const EmptyCropError&) {
      r.skipped = true;
    }
    r.reflection_correct = r.reflection.accepted() && r.reflection.reflection_index == r.target.reflection;
    r.pose_correct = dist::pose_window_contains(r.pose, r.target.reflection, r.target.revolution_deg, policy.window_deg);
    ++report.reflection.instances;
    ++report.pose.instances;
    if (r.reflection.accepted()) ++report.reflection.accepted;
    if (r.reflection_correct) ++report.reflection.correct;
    if (r.pose.accepted()) ++report.pose.accepted;
    if (r.pose_correct) ++report.pose.correct;
    report.instances.push_back(r);
  }
  return report;
}

EvalReport evaluate(const synth::Dataset& data, const pipeline::Estimator& estimator, const PolicyConfig& policy,
                    std::uint64_t seed, const synth::JitterConfig& jitter, const std::string& split) {
  const DistributionFn fn = [&](const geometry::PointCloud& cloud, const geometry::RigidTransform& init,
                                const synth::InstanceRecord& rec, const synth::GridBin&) {
    return estimator.estimate(cloud, init, instance_seed(seed, rec.scene, rec.object) ^ 0x9E3779B97F4A7C15ull);
  };
  return evaluate(data, fn, policy, seed, jitter, split, estimator.model().config.n_revolution);
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "object,task,instances,coverage,precision\n";
  for (const auto& [task, stats] : {std::pair{"reflection", report.reflection}, std::pair{"pose", report.pose}}) {
    out << report.object << ',' << task << ',' << stats.instances << ',' << percent(stats.coverage()) << ','
        << percent(stats.precision()) << '\n';
  }
}

std::string format_report_table(const EvalReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "cutoff %.3g, pose window %.3g deg\n", report.policy.cutoff,
                report.policy.window_deg);
  os << line;
  std::snprintf(line, sizeof line, "%-24s %-11s %9s %10s %10s\n", "object", "task", "instances", "coverage",
                "precision");
  os << line;
  for (const auto& [task, stats] : {std::pair{"reflection", report.reflection}, std::pair{"pose", report.pose}}) {
    const std::string cov = percent(stats.coverage()) + "%";
    const auto prec = stats.precision();
    const std::string pr = prec ? percent(prec) + "%" : "N/A";
    std::snprintf(line, sizeof line, "%-24s %-11s %9zu %10s %10s\n", report.object.c_str(), task, stats.instances,
                  cov.c_str(), pr.c_str());
    os << line;
  }
  return os.str();
}

void write_instances_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "scene,object,feature_pixels,target_reflection,target_deg,reflection_decision,reflection_confidence,"
         "pose_decision,pose_reflection,pose_center_deg,pose_confidence,reflection_entropy,revolution_entropy\n";
  for (const auto& r : report.instances) {
    out << r.scene << ',' << r.object << ',' << r.feature_pixels << ',' << r.target.reflection << ','
        << r.target.revolution_deg << ',' << dist::to_string(r.reflection.kind) << ',' << r.reflection.confidence
        << ',' << dist::to_string(r.pose.kind) << ',' << r.pose.reflection_index << ',' << r.pose.window_center_deg
        << ',' << r.pose.confidence << ',' << r.reflection_entropy << ',' << r.revolution_entropy << '\n';
  }
}

}  // namespace opde::eval
