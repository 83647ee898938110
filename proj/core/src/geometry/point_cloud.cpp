#include "opde/geometry/point_cloud.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "opde/error.hpp"

namespace opde::geometry {

PointCloud::PointCloud(Points p, Points n) : positions(std::move(p)), normals(std::move(n)) {
  if (positions.rows() != normals.rows()) throw ShapeError("PointCloud: positions/normals row mismatch");
}

void validate(const PointCloud& cloud, double tolerance) {
  if (cloud.positions.rows() != cloud.normals.rows()) {
    throw DomainError("PointCloud: positions/normals row mismatch");
  }
  for (Eigen::Index i = 0; i < cloud.normals.rows(); ++i) {
    const double len = cloud.normals.row(i).norm();
    if (!(std::abs(len - 1.0) <= tolerance)) {
      throw DomainError("PointCloud: normal " + std::to_string(i) + " has length " + std::to_string(len));
    }
  }
}

PointCloud transformed(const PointCloud& cloud, const RigidTransform& t) {
  PointCloud out;
  out.positions = (cloud.positions * t.rotation().transpose()).rowwise() + t.translation().transpose();
  out.normals = cloud.normals * t.rotation().transpose();
  return out;
}

Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> to_features(const PointCloud& cloud) {
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f(cloud.positions.rows(), 6);
  f.leftCols(3) = cloud.positions.cast<float>();
  f.rightCols(3) = cloud.normals.cast<float>();
  return f;
}

namespace {

struct PlyHeader {
  std::size_t vertex_count = 0;
  std::size_t property_count = 0;
  std::array<int, 6> columns{-1, -1, -1, -1, -1, -1};  // x y z nx ny nz
};

PlyHeader parse_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw DataError("PLY: missing magic");
  PlyHeader header;
  bool in_vertex = false;
  bool seen_vertex = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw DataError("PLY: only ascii format is supported, got " + fmt);
    } else if (keyword == "element") {
      std::string name;
      std::size_t count = 0;
      ls >> name >> count;
      if (seen_vertex && !in_vertex) continue;
      if (name == "vertex") {
        if (seen_vertex) throw DataError("PLY: duplicate vertex element");
        in_vertex = seen_vertex = true;
        header.vertex_count = count;
      } else if (in_vertex) {
        in_vertex = false;
      } else {
        throw DataError("PLY: elements before vertex are not supported");
      }
    } else if (keyword == "property" && in_vertex) {
      std::string type, name;
      ls >> type >> name;
      if (type == "list") throw DataError("PLY: list properties on vertex are not supported");
      static const std::array<const char*, 6> kNames{"x", "y", "z", "nx", "ny", "nz"};
      for (std::size_t c = 0; c < kNames.size(); ++c) {
        if (name == kNames[c]) header.columns[c] = static_cast<int>(header.property_count);
      }
      ++header.property_count;
    } else if (keyword == "end_header") {
      for (int c : header.columns) {
        if (c < 0) throw DataError("PLY: vertex needs x y z nx ny nz properties");
      }
      return header;
    }
  }
  throw DataError("PLY: missing end_header");
}

}  // namespace

PointCloud read_ply(std::istream& in) {
  const PlyHeader header = parse_header(in);
  PointCloud cloud;
  const auto n = static_cast<Eigen::Index>(header.vertex_count);
  cloud.positions.resize(n, 3);
  cloud.normals.resize(n, 3);
  std::vector<double> row(header.property_count);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (auto& v : row) {
      if (!(in >> v)) throw DataError("PLY: truncated vertex data at vertex " + std::to_string(i));
    }
    for (int c = 0; c < 3; ++c) {
      cloud.positions(i, c) = row[static_cast<std::size_t>(header.columns[static_cast<std::size_t>(c)])];
      cloud.normals(i, c) = row[static_cast<std::size_t>(header.columns[static_cast<std::size_t>(c + 3)])];
    }
  }
  return cloud;
}

PointCloud read_ply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open PLY file: " + path);
  return read_ply(in);
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property float nx\nproperty float ny\nproperty float nz\nend_header\n";
  char buf[256];
  for (Eigen::Index i = 0; i < cloud.positions.rows(); ++i) {
    const int len = std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g %.9g %.9g\n",
                                  cloud.positions(i, 0), cloud.positions(i, 1), cloud.positions(i, 2),
                                  cloud.normals(i, 0), cloud.normals(i, 1), cloud.normals(i, 2));
    out.write(buf, len);
  }
}

void write_ply_file(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write PLY file: " + path);
  write_ply(out, cloud);
}

}  // namespace opde::geometry
