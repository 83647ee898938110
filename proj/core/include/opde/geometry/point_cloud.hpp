#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "opde/geometry/transform.hpp"

namespace opde::geometry {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Oriented point cloud: positions in meters (or normalized units after
/// preprocessing) and unit normals, row-aligned.
struct PointCloud {
  Points positions;
  Points normals;

  PointCloud() = default;
  PointCloud(Points p, Points n);

  std::size_t size() const { return static_cast<std::size_t>(positions.rows()); }
  bool empty() const { return positions.rows() == 0; }

  Vec3 position(std::size_t i) const { return positions.row(static_cast<Eigen::Index>(i)).transpose(); }
  Vec3 normal(std::size_t i) const { return normals.row(static_cast<Eigen::Index>(i)).transpose(); }

  /// Rows selected by index, in the given order (duplicates allowed).
  template <typename IndexRange>
  PointCloud select(const IndexRange& indices) const {
    PointCloud out;
    out.positions.resize(static_cast<Eigen::Index>(std::size(indices)), 3);
    out.normals.resize(out.positions.rows(), 3);
    Eigen::Index row = 0;
    for (auto i : indices) {
      out.positions.row(row) = positions.row(static_cast<Eigen::Index>(i));
      out.normals.row(row) = normals.row(static_cast<Eigen::Index>(i));
      ++row;
    }
    return out;
  }
};

/// Throws DomainError if sizes disagree or some normal is not unit length
/// within `tolerance`.
void validate(const PointCloud& cloud, double tolerance = 1e-4);

/// Applies `t` to positions and its rotation to normals.
PointCloud transformed(const PointCloud& cloud, const RigidTransform& t);

/// n x 6 row-major float features (position, normal) as consumed by the encoder.
Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> to_features(const PointCloud& cloud);

// ASCII PLY with vertex properties x y z nx ny nz. Extra vertex properties
// are skipped on read; faces and other elements are ignored.
PointCloud read_ply(std::istream& in);
PointCloud read_ply_file(const std::string& path);
void write_ply(std::ostream& out, const PointCloud& cloud);
void write_ply_file(const std::string& path, const PointCloud& cloud);

}  // namespace opde::geometry
