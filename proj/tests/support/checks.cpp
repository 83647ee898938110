#include "checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "opde/dist/aggregator.hpp"
#include "opde/dist/distribution.hpp"
#include "opde/dist/keypoint_features.hpp"
#include "opde/geometry/nn_index.hpp"
#include "opde/geometry/sample_grid.hpp"
#include "opde/nn/autodiff.hpp"
#include "opde/nn/encoder.hpp"

namespace opde::checks {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

}  // namespace

CheckResult grid_check() {
  using geometry::Mat4;
  const auto t0 = std::chrono::steady_clock::now();
  const geometry::SampleGrid grid = geometry::build_sample_grid(geometry::RigidTransform::identity(), 360);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = static_cast<double>(i % 360) * M_PI / 180.0;
    Mat4 rz = Mat4::Identity(), ry = Mat4::Identity();
    rz.topLeftCorner<3, 3>() << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    if (i >= 360) ry.topLeftCorner<3, 3>() << -1, 0, 0, 0, 1, 0, 0, 0, -1;
    worst = std::max(worst, (grid[i].transform.matrix() - ry * rz).cwiseAbs().maxCoeff());
  }
  const bool first = grid.size() > 0 && grid[0].transform == geometry::RigidTransform::identity();
  CheckResult r;
  r.pass = grid.size() == 720 && first && worst <= 1e-9 && ms < 10.0;
  r.detail = fmt("%.0f transforms, max deviation %.2e, %.3f ms", static_cast<double>(grid.size()), worst, ms) +
             (first ? "" : ", entry 0 differs from T_init");
  return r;
}

CheckResult softmax_check(int vectors) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 100.0);
  double worst_sum = 0.0, worst_grad = 0.0;
  for (int v = 0; v < vectors; ++v) {
    const double s = scale(rng);
    Eigen::VectorXd x(720);
    for (auto& e : x) e = s * g(rng);
    const dist::PoseDistribution d = dist::normalize(x);
    worst_sum = std::max(worst_sum, std::abs(d.probs.sum() - 1.0));
    if (v % 100 == 0) {
      const auto pos = static_cast<Eigen::Index>(v % 720);
      nn::Parameter<double> p{"s", x, {}};
      p.zero_grad();
      nn::Graph<double> graph;
      graph.backward(graph.infonce(graph.parameter(p), pos));
      Eigen::VectorXd want = d.probs;
      want[pos] -= 1.0;
      worst_grad = std::max(worst_grad, (p.grad.col(0) - want).cwiseAbs().maxCoeff());
    }
  }
  const double uniform = std::abs(dist::infonce_loss(Eigen::VectorXd::Zero(720), 0) - std::log(720.0));
  CheckResult r;
  r.pass = worst_sum <= 1e-6 && uniform <= 1e-6 && worst_grad <= 1e-6;
  r.detail = fmt("max |sum-1| %.2e, |uniform loss - ln720| %.2e, max grad error %.2e", worst_sum, uniform, worst_grad);
  return r;
}

CheckResult keypoint_oracle_check(int clouds) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const geometry::SampleGrid grid(geometry::RigidTransform::identity(), 360);
  long total = 0, match = 0;
  for (int c = 0; c < clouds; ++c) {
    // a noisy cylinder-ish shell plus uniform clutter
    geometry::Points pts(4096, 3), kps(32, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (i % 4 == 0) {
        pts.row(i) << u(rng), u(rng), u(rng);
      } else {
        const double a = M_PI * u(rng);
        pts.row(i) << 0.55 * std::cos(a), 0.55 * std::sin(a), 0.8 * u(rng);
      }
    }
    for (Eigen::Index i = 0; i < kps.rows(); ++i) kps.row(i) << 0.6 * u(rng), 0.6 * u(rng), 0.9 * u(rng);
    const geometry::NNIndex index(pts);
    const dist::KeypointFeaturePack pack = dist::extract_keypoint_features(index, kps, grid);
    for (std::size_t s = 0; s < grid.size(); ++s) {
      const auto inv = grid[s].transform.inverse();
      for (std::size_t k = 0; k < 32; ++k) {
        const geometry::Vec3 q = inv * geometry::Vec3(kps.row(static_cast<Eigen::Index>(k)).transpose());
        Eigen::Index best;
        (pts.rowwise() - q.transpose()).rowwise().squaredNorm().minCoeff(&best);
        ++total;
        if (pack.point_id(s, k) == static_cast<int>(best)) ++match;
      }
    }
  }
  CheckResult r;
  r.pass = total > 0 && match == total;
  r.detail = fmt("%.0f/%.0f queries match the exhaustive scan", static_cast<double>(match), static_cast<double>(total));
  return r;
}

CheckResult gradient_check(int sampled) {
  nn::ModelConfig cfg;
  cfg.n_points = 64;
  cfg.k_neighbors = 8;
  cfg.n_keypoints = 4;
  cfg.n_revolution = 4;  // 8 candidates
  cfg.feature_dim = 8;
  cfg.edge_hidden = 8;
  cfg.point_hidden = 8;
  cfg.aggregator_dim = 8;
  cfg.head_hidden = 16;
  auto params = nn::ModelParams<double>::initialize(cfg, 5);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  geometry::Points pts(64, 3), kps(4, 3);
  nn::Matrix<double> features(64, 6);
  for (Eigen::Index i = 0; i < 64; ++i) {
    pts.row(i) << u(rng), u(rng), u(rng);
    Eigen::Vector3d n(u(rng), u(rng), u(rng));
    features.row(i) << pts.row(i), n.normalized().transpose();
  }
  for (Eigen::Index i = 0; i < 4; ++i) kps.row(i) << u(rng), u(rng), u(rng);
  const geometry::NNIndex index(pts);
  const auto knn = index.knn_graph(cfg.k_neighbors);
  const geometry::SampleGrid grid(geometry::RigidTransform::identity(), cfg.n_revolution);
  const auto pack = dist::extract_keypoint_features(index, kps, grid);
  const Eigen::Index target = 5;

  auto loss_of = [&](bool backward) {
    nn::Graph<double> g(backward);
    const nn::Var emb = nn::encode_points(g, params, cfg, features, knn);
    const nn::Var scores = dist::score_candidates(g, params, cfg, emb, pack);
    const nn::Var loss = g.infonce(scores, target);
    if (backward) {
      for (auto& t : params.tensors()) t.zero_grad();
      g.backward(loss);
    }
    return g.value(loss)(0, 0);
  };
  loss_of(true);

  // sample (tensor, entry) pairs uniformly over all scalars
  std::vector<std::pair<std::size_t, Eigen::Index>> all;
  for (std::size_t t = 0; t < params.tensors().size(); ++t) {
    for (Eigen::Index i = 0; i < params.tensors()[t].value.size(); ++i) all.push_back({t, i});
  }
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(sampled)));

  double worst = 0.0;
  int passed = 0;
  const double h = 1e-6;
  for (auto [t, i] : all) {
    auto& p = params.tensors()[t];
    const double analytic = p.grad.data()[i];
    const double keep = p.value.data()[i];
    p.value.data()[i] = keep + h;
    const double up = loss_of(false);
    p.value.data()[i] = keep - h;
    const double down = loss_of(false);
    p.value.data()[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-7});
    worst = std::max(worst, rel);
    if (rel < 1e-3) ++passed;
  }
  CheckResult r;
  r.pass = passed == static_cast<int>(all.size()) && passed >= 50;
  r.detail = fmt("%.0f/%.0f sampled parameters within 1e-3, worst relative error %.2e", passed,
                 static_cast<double>(all.size()), worst);
  return r;
}

}  // namespace opde::checks
