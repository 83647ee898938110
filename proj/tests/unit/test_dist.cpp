#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "opde/dist/distribution.hpp"
#include "opde/dist/keypoint_features.hpp"
#include "opde/dist/policy.hpp"
#include "opde/error.hpp"
#include "opde/nn/autodiff.hpp"

using namespace opde;
using namespace opde::dist;

namespace {

Eigen::VectorXd random_scores(std::mt19937_64& rng, double scale = 5.0, int n = 720) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd s(n);
  for (auto& v : s) v = g(rng);
  return s;
}

// Distribution with `mass` spread evenly over the given (reflection, bin) cells
// and the rest spread over everything else.
PoseDistribution peaked(const std::vector<std::pair<int, int>>& cells, double mass, int n_rev = 360) {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(2 * n_rev, (1.0 - mass) / (2 * n_rev - static_cast<double>(cells.size())));
  for (auto [r, b] : cells) p[r * n_rev + b] = mass / static_cast<double>(cells.size());
  return normalize(p.array().log().matrix(), n_rev);
}

}  // namespace

TEST(Softmax, SumsToOneOnRandomScores) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const PoseDistribution d = normalize(random_scores(rng, i % 2 ? 50.0 : 1.0));
    ASSERT_NEAR(d.probs.sum(), 1.0, 1e-6);
  }
}

TEST(Softmax, StableAndShiftInvariant) {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd s = random_scores(rng);
  const PoseDistribution a = normalize(s);
  const PoseDistribution b = normalize(s.array() + 1e4);
  EXPECT_LT((a.probs - b.probs).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::VectorXd bad = s;
  bad[5] = std::nan("");
  EXPECT_THROW(normalize(bad), NumericalError);
  EXPECT_THROW(normalize(s, 100), ShapeError);
}

TEST(Softmax, SummaryStatistics) {
  const PoseDistribution u = normalize(Eigen::VectorXd::Zero(720));
  EXPECT_NEAR(u.entropy(), std::log(720.0), 1e-12);
  EXPECT_NEAR(u.reflection_mass(1), 0.5, 1e-12);
  EXPECT_NEAR(u.revolution_marginal().sum(), 1.0, 1e-12);
  EXPECT_EQ(u.argmax(), 0u);
  const PoseDistribution p = peaked({{1, 42}}, 0.9);
  EXPECT_EQ(p.argmax(), 402u);
  EXPECT_NEAR(p.revolution_marginal()[42], 0.9 + 0.1 / 719, 1e-12);
}

TEST(Infonce, UniformIsLogN) {
  EXPECT_NEAR(infonce_loss(Eigen::VectorXd::Zero(720), 0), std::log(720.0), 1e-12);
  EXPECT_NEAR(infonce_loss(Eigen::VectorXd::Constant(720, 3.5), 400), std::log(720.0), 1e-12);
  EXPECT_THROW(infonce_loss(Eigen::VectorXd::Zero(720), 720), DomainError);
}

TEST(Infonce, GradientIsProbsMinusOneHot) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd s = random_scores(rng);
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, 719)(rng);
    nn::Parameter<double> p{"s", s, {}};
    p.zero_grad();
    nn::Graph<double> g;
    const nn::Var loss = g.infonce(g.parameter(p), static_cast<Eigen::Index>(pos));
    EXPECT_NEAR(g.value(loss)(0, 0), infonce_loss(s, pos), 1e-9);
    g.backward(loss);
    Eigen::VectorXd expected = normalize(s).probs;
    expected[static_cast<Eigen::Index>(pos)] -= 1.0;
    EXPECT_LT((p.grad.col(0) - expected).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(DistributionCsv, RoundTripAndErrors) {
  std::mt19937_64 rng(4);
  const PoseDistribution d = normalize(random_scores(rng, 1.0, 16), 8);
  std::stringstream ss;
  write_distribution_csv(ss, d);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "reflection,angle_deg,prob");
  const PoseDistribution back = read_distribution_csv(ss);
  EXPECT_EQ(back.n_revolution, 8);
  EXPECT_LT((back.probs - d.probs).cwiseAbs().maxCoeff(), 1e-8);
  std::stringstream bad("reflection,angle_deg,prob\n0,0,abc\n");
  EXPECT_THROW(read_distribution_csv(bad), DataError);
}

TEST(Policy, ReflectionCutoff) {
  const PoseDistribution sure = peaked({{1, 10}, {1, 200}}, 0.995);
  const PolicyDecision a = policy_reflection(sure, 0.99);
  EXPECT_EQ(a.kind, DecisionKind::accept_reflection);
  EXPECT_EQ(a.reflection_index, 1);
  const PolicyDecision r = policy_reflection(normalize(Eigen::VectorXd::Zero(720)), 0.99);
  EXPECT_EQ(r.kind, DecisionKind::reject);
  EXPECT_FALSE(r.accepted());
  // the cutoff itself is enough
  Eigen::VectorXd p = Eigen::VectorXd::Constant(720, 0.25 / 360);
  p.head(360).setConstant(0.75 / 360);
  EXPECT_TRUE(policy_reflection(normalize(p.array().log().matrix()), 0.75 - 1e-12).accepted());
}

TEST(Policy, PoseWindowWrapsAround) {
  const PoseDistribution d = peaked({{0, 355}, {0, 358}, {0, 0}, {0, 3}}, 0.995);
  const PolicyDecision a = policy_pose(d, 0.99, 15.0);
  ASSERT_EQ(a.kind, DecisionKind::accept_pose);
  EXPECT_EQ(a.reflection_index, 0);
  EXPECT_TRUE(pose_window_contains(a, 0, 359.0, 15.0));
  EXPECT_TRUE(pose_window_contains(a, 0, 1.0, 15.0));
  EXPECT_FALSE(pose_window_contains(a, 1, 1.0, 15.0));
  EXPECT_FALSE(pose_window_contains(a, 0, 180.0, 15.0));
  EXPECT_GE(a.confidence, 0.99);
  // too spread for 15 degrees
  EXPECT_FALSE(policy_pose(peaked({{0, 0}, {0, 40}}, 0.995), 0.99, 15.0).accepted());
  EXPECT_FALSE(policy_pose(normalize(Eigen::VectorXd::Zero(720)), 0.99, 15.0).accepted());
  // a window covering the full circle collapses to the row mass
  EXPECT_TRUE(policy_pose(peaked({{1, 0}, {1, 180}}, 0.995), 0.99, 360.0).accepted());
}

TEST(Policy, TiesPreferFirstReflectionAndLowestAngle) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(720);
  p[100] = p[460] = 0.5;
  PoseDistribution d;
  d.probs = p;
  const PolicyDecision a = policy_pose(d, 0.4, 15.0);
  EXPECT_EQ(a.reflection_index, 0);
  EXPECT_NEAR(a.window_center_deg, 93.0, 1e-9);
  EXPECT_NEAR(a.confidence, 0.5, 1e-12);
}

TEST(KeypointFeatures, MatchLinearScanOnRandomClouds) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const geometry::SampleGrid grid(geometry::RigidTransform::identity(), 360);
  for (int c = 0; c < 20; ++c) {
    geometry::Points pts(2048, 3), kps(32, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << u(rng), u(rng), 0.5 * u(rng);
    for (Eigen::Index i = 0; i < kps.rows(); ++i) kps.row(i) << u(rng), u(rng), u(rng);
    const geometry::NNIndex index(pts);
    const KeypointFeaturePack pack = extract_keypoint_features(index, kps, grid);
    ASSERT_EQ(pack.n_samples, 720u);
    for (std::size_t s = 0; s < grid.size(); ++s) {
      const auto inv = grid[s].transform.inverse();
      for (std::size_t k = 0; k < 32; ++k) {
        const geometry::Vec3 q = inv * geometry::Vec3(kps.row(static_cast<Eigen::Index>(k)).transpose());
        Eigen::Index best;
        (pts.rowwise() - q.transpose()).rowwise().squaredNorm().minCoeff(&best);
        ASSERT_EQ(pack.point_id(s, k), static_cast<int>(best)) << "cloud " << c << " sample " << s;
        ASSERT_LT((pack.delta(s, k) - (q - pts.row(best).transpose())).norm(), 1e-12);
      }
    }
  }
  EXPECT_THROW(extract_keypoint_features(geometry::NNIndex(geometry::Points::Ones(3, 3)), geometry::Points(0, 3), grid),
               DomainError);
}
