#include "opde/geometry/transform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "opde/error.hpp"

namespace opde::geometry {
namespace {

// cos/sin with exact values at multiples of 90 degrees.
std::pair<double, double> cos_sin_deg(double deg) {
  const double quarter = deg / 90.0;
  if (quarter == std::floor(quarter) && std::abs(quarter) < 1e15) {
    switch (static_cast<long long>(((static_cast<long long>(quarter) % 4) + 4) % 4)) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double rad = deg * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

}  // namespace

Mat3 rot_x(double deg) {
  const auto [c, s] = cos_sin_deg(deg);
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Mat3 rot_y(double deg) {
  const auto [c, s] = cos_sin_deg(deg);
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

Mat3 rot_z(double deg) {
  const auto [c, s] = cos_sin_deg(deg);
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

Mat3 axis_angle(const Vec3& axis, double deg) {
  const double n = axis.norm();
  if (n == 0.0) {
    if (deg == 0.0) return Mat3::Identity();
    throw DomainError("axis_angle: zero rotation axis");
  }
  return Eigen::AngleAxisd(deg * std::numbers::pi / 180.0, axis / n).toRotationMatrix();
}

double geodesic_deg(const Mat3& a, const Mat3& b) {
  const double c = std::clamp(((a.transpose() * b).trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

RigidTransform::RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw DomainError("RigidTransform: non-finite entries");
  }
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kOrthonormalTolerance || rotation.determinant() < 0.0) {
    std::ostringstream msg;
    msg << "RigidTransform: rotation is not in SO(3) (|R^T R - I|max = " << ortho
        << ", det = " << rotation.determinant() << ")";
    throw DomainError(msg.str());
  }
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw DomainError("RigidTransform: bottom row must be 0 0 0 1");
  }
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return {rt, -(rt * translation_), Unchecked{}};
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_, Unchecked{}};
}

RigidTransform read_transform(std::istream& in) {
  Mat4 m;
  for (int i = 0; i < 16; ++i) {
    double v = 0.0;
    if (!(in >> v)) throw DataError("read_transform: expected 16 numbers");
    m(i / 4, i % 4) = v;
  }
  try {
    return RigidTransform::from_matrix(m);
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
}

RigidTransform read_transform_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open transform file: " + path);
  return read_transform(in);
}

void write_transform(std::ostream& out, const RigidTransform& t) {
  const Mat4 m = t.matrix();
  out << std::setprecision(17);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out << m(r, c) << (c == 3 ? '\n' : ' ');
  }
}

void write_transform_file(const std::string& path, const RigidTransform& t) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write transform file: " + path);
  write_transform(out, t);
}

}  // namespace opde::geometry
