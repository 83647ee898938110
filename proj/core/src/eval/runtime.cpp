#include "opde/eval/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "opde/error.hpp"
#include "opde/geometry/sample_grid.hpp"

namespace opde::eval {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ms_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

RuntimeReport runtime_bench(const pipeline::Estimator& estimator, const std::filesystem::path& cloud_path,
                            const geometry::RigidTransform& init_pose, int repeats) {
  if (repeats < 1) throw DomainError("runtime_bench: repeats must be >= 1");
  RuntimeReport report;
  report.repeats = repeats;
  std::vector<double> load, encode, nn, agg, head, scoring, total, grid;
  for (int run = -1; run < repeats; ++run) {
    pipeline::StageTimings t;
    const auto start = std::chrono::steady_clock::now();
    const auto cloud = geometry::read_ply_file(cloud_path.string());
    const double read_ms = ms_since(start);
    (void)estimator.estimate(cloud, init_pose, 0, &t);
    const double all = ms_since(start);

    const auto gstart = std::chrono::steady_clock::now();
    const auto g = geometry::build_sample_grid(init_pose, estimator.model().config.n_revolution);
    const double grid_ms = ms_since(gstart);
    if (g.size() == 0) throw NumericalError("empty grid");
    if (run < 0) continue;  // warm-up
    load.push_back(read_ms + t.preprocess_ms);
    encode.push_back(t.encode_ms);
    nn.push_back(t.nn_ms);
    agg.push_back(t.aggregate_ms);
    head.push_back(t.head_ms);
    scoring.push_back(t.scoring_ms());
    total.push_back(all);
    grid.push_back(grid_ms);
  }
  const std::pair<const char*, std::vector<double>*> rows[] = {{"Loading point cloud", &load},
                                                               {"Feature encoding", &encode},
                                                               {"Nearest neighbor", &nn},
                                                               {"Feature aggregator", &agg},
                                                               {"Model head", &head}};
  double cum = 0.0;
  for (const auto& [name, v] : rows) {
    const double m = median(*v);
    cum += m;
    report.stages.push_back({name, m, cum});
  }
  report.grid_ms = median(grid);
  report.scoring_ms = median(scoring);
  report.total_ms = median(total);
  return report;
}

std::string format_runtime_table(const RuntimeReport& r) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-22s %12s %14s\n", "stage", "median ms", "cumulative ms");
  os << line;
  for (const auto& s : r.stages) {
    std::snprintf(line, sizeof line, "%-22s %12.3f %14.3f\n", s.name.c_str(), s.median_ms, s.cumulative_ms);
    os << line;
  }
  std::snprintf(line, sizeof line, "%-22s %12.3f\n", "Sample grid", r.grid_ms);
  os << line;
  std::snprintf(line, sizeof line, "scoring median %.3f ms, full pass median %.3f ms over %d runs\n", r.scoring_ms,
                r.total_ms, r.repeats);
  os << line;
  return os.str();
}

}  // namespace opde::eval
