#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "opde/error.hpp"
#include "opde/geometry/angles.hpp"
#include "opde/geometry/nn_index.hpp"
#include "opde/geometry/preprocess.hpp"
#include "opde/geometry/sample_grid.hpp"
#include "opde/geometry/sampling.hpp"

using namespace opde;
using namespace opde::geometry;

namespace {

Points random_points(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Points p(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) << u(rng), u(rng), u(rng);
  return p;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

Neighbor linear_nearest(const Points& p, const Vec3& q) {
  Neighbor best{-1, std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double d = (p.row(i).transpose() - q).norm();
    if (d < best.distance) best = {static_cast<int>(i), d};
  }
  return best;
}

}  // namespace

TEST(Transform, RejectsNonRotation) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = -1.0;
  EXPECT_THROW(RigidTransform(m, Vec3::Zero()), DomainError);
  EXPECT_THROW(RigidTransform(2.0 * Mat3::Identity(), Vec3::Zero()), DomainError);
}

TEST(Transform, InverseAndComposition) {
  std::mt19937_64 rng(3);
  const RigidTransform a(random_rotation(rng), Vec3(0.1, -0.2, 0.3));
  const RigidTransform b(random_rotation(rng), Vec3(-0.5, 0.0, 1.0));
  EXPECT_TRUE((a * a.inverse()).matrix().isApprox(Mat4::Identity(), 1e-12));
  EXPECT_TRUE((a * b).matrix().isApprox(a.matrix() * b.matrix(), 1e-12));
  const Vec3 p(0.3, 0.4, 0.5);
  EXPECT_TRUE((a * (b * p)).isApprox((a * b) * p, 1e-12));
}

TEST(Transform, TextRoundTrip) {
  std::mt19937_64 rng(4);
  const RigidTransform a(random_rotation(rng), Vec3(0.1, 0.2, 0.3));
  std::stringstream ss;
  write_transform(ss, a);
  const RigidTransform b = read_transform(ss);
  EXPECT_TRUE(a.matrix().isApprox(b.matrix(), 1e-15));
  std::stringstream bad("1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 2");
  EXPECT_THROW(read_transform(bad), Error);
}

TEST(Transform, AxisRotationsAreExactAtQuarterTurns) {
  EXPECT_EQ(rot_y(180.0)(0, 0), -1.0);
  EXPECT_EQ(rot_y(180.0)(0, 2), 0.0);
  EXPECT_EQ(rot_z(90.0)(0, 1), -1.0);
  EXPECT_NEAR(geodesic_deg(rot_z(10.0), rot_z(25.0)), 15.0, 1e-9);
  EXPECT_NEAR(circular_angle_distance(350.0, 5.0), 15.0, 1e-12);
  EXPECT_NEAR(wrap_degrees(-30.0), 330.0, 1e-12);
}

TEST(SampleGrid, MatchesDirectProduct) {
  std::mt19937_64 rng(5);
  const RigidTransform init(random_rotation(rng), Vec3(0.02, -0.01, 0.4));
  const SampleGrid grid(init, 360);
  ASSERT_EQ(grid.size(), 720u);
  EXPECT_EQ(grid[0].transform, init);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int ref = static_cast<int>(i) / 360;
    const int rev = static_cast<int>(i) % 360;
    EXPECT_EQ(grid[i].reflection_index, ref);
    EXPECT_EQ(grid[i].revolution_index, rev);
    Mat4 ry = Mat4::Identity(), rz = Mat4::Identity();
    const double a = rev * M_PI / 180.0;
    rz.topLeftCorner<3, 3>() << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    if (ref) ry.topLeftCorner<3, 3>() << -1, 0, 0, 0, 1, 0, 0, 0, -1;
    const Mat4 direct = ry * rz * init.matrix();
    EXPECT_LT((grid[i].transform.matrix() - direct).cwiseAbs().maxCoeff(), 1e-9) << "entry " << i;
  }
}

TEST(SampleGrid, IdentityIsFast) {
  const auto t0 = std::chrono::steady_clock::now();
  const SampleGrid grid = build_sample_grid(RigidTransform::identity(), 360);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(grid.size(), 720u);
  EXPECT_LT(ms, 10.0);
}

TEST(SampleGrid, RejectsBadArguments) {
  EXPECT_THROW(SampleGrid(RigidTransform::identity(), 0), DomainError);
  EXPECT_THROW(compose_sample_transform(90.0, 0.0, RigidTransform::identity()), DomainError);
}

TEST(NNIndex, MatchesLinearScan) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Points p = random_points(500 + 300 * trial, rng);
    const NNIndex index(p);
    const Points q = random_points(400, rng, 1.3);
    int hint = 0;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const Vec3 qi = q.row(i).transpose();
      const Neighbor want = linear_nearest(p, qi);
      const Neighbor got = index.nearest(qi);
      ASSERT_EQ(got.index, want.index);
      EXPECT_NEAR(got.distance, want.distance, 1e-12);
      ASSERT_EQ(index.nearest(qi, hint).index, want.index);
      hint = got.index;
    }
  }
}

TEST(NNIndex, DuplicatesResolveToLowestIndex) {
  Points p(4, 3);
  p << 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0;
  const NNIndex index(p);
  EXPECT_EQ(index.nearest(Vec3(0.1, 0, 0)).index, 1);
  EXPECT_EQ(index.nearest(Vec3(0.1, 0, 0), 3).index, 1);
  EXPECT_THROW(NNIndex(Points(0, 3)), DomainError);
}

TEST(NNIndex, KnnMatchesSortedScan) {
  std::mt19937_64 rng(7);
  const Points p = random_points(300, rng);
  const NNIndex index(p);
  const auto graph = index.knn_graph(10);
  ASSERT_EQ(graph.size(), 3000u);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    std::vector<std::pair<double, int>> all;
    for (Eigen::Index j = 0; j < p.rows(); ++j) all.push_back({(p.row(j) - p.row(i)).squaredNorm(), static_cast<int>(j)});
    std::sort(all.begin(), all.end());
    for (int k = 0; k < 10; ++k) ASSERT_EQ(graph[static_cast<std::size_t>(i * 10 + k)], all[static_cast<std::size_t>(k)].second);
  }
}

TEST(FarthestPointSample, MatchesBruteForce) {
  std::mt19937_64 rng(8);
  const Points v = random_points(200, rng);
  for (std::uint64_t seed : {0u, 11u}) {
    const KeypointSet got = farthest_point_sample(v, 16, seed);
    ASSERT_EQ(got.size(), 16u);
    // brute force: recompute min distance to the chosen set from scratch
    std::vector<int> chosen{got.vertex_ids[0]};
    while (chosen.size() < 16) {
      double best = -1.0;
      int arg = -1;
      for (Eigen::Index i = 0; i < v.rows(); ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (int c : chosen) d = std::min(d, (v.row(i) - v.row(c)).squaredNorm());
        if (d > best) {
          best = d;
          arg = static_cast<int>(i);
        }
      }
      chosen.push_back(arg);
    }
    EXPECT_EQ(got.vertex_ids, chosen);
  }
  const KeypointSet centroid_start = farthest_point_sample(v, 1, 0);
  const Eigen::RowVector3d mean = v.colwise().mean();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    EXPECT_LE((v.row(centroid_start.vertex_ids[0]) - mean).norm(), (v.row(i) - mean).norm() + 1e-15);
  }
  EXPECT_THROW(farthest_point_sample(v, 0), DomainError);
  EXPECT_THROW(farthest_point_sample(v, 201), DomainError);
}

TEST(PointCloud, PlyRoundTripAndErrors) {
  std::mt19937_64 rng(9);
  Points p = random_points(50, rng);
  Points n = random_points(50, rng);
  n.rowwise().normalize();
  const PointCloud cloud(p, n);
  std::stringstream ss;
  write_ply(ss, cloud);
  const PointCloud back = read_ply(ss);
  ASSERT_EQ(back.size(), 50u);
  EXPECT_LT((back.positions - p).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((back.normals - n).cwiseAbs().maxCoeff(), 1e-8);

  std::stringstream truncated("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
                              "property float z\nproperty float nx\nproperty float ny\nproperty float nz\n"
                              "end_header\n0 0 0 0 0 1\n");
  EXPECT_THROW(read_ply(truncated), DataError);
  std::stringstream garbage("not a ply");
  EXPECT_THROW(read_ply(garbage), DataError);
}

TEST(Preprocess, CropNormalizeResample) {
  std::mt19937_64 rng(10);
  Points p(3, 3);
  p << 0.01, 0, 0, 0.5, 0, 0, 0, 0.015, 0;
  Points n(3, 3);
  n << 0, 0, 1, 0, 0, 1, 0, 0, 1;
  const PointCloud c(p, n);
  const PointCloud out = normalize_and_crop(c, Vec3::Zero(), 0.02, 1.2, rng, 16);
  ASSERT_EQ(out.size(), 16u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_LE(out.position(i).norm(), 1.2);
  EXPECT_THROW(normalize_and_crop(c, Vec3(5, 5, 5), 0.02, 1.2, rng, 16), EmptyCropError);
  EXPECT_THROW(normalize_and_crop(c, Vec3::Zero(), 0.0, 1.2, rng, 16), DomainError);

  const PointCloud down = resample(PointCloud(random_points(100, rng), n.replicate(34, 1).topRows(100)), 10, rng);
  EXPECT_EQ(down.size(), 10u);
}
