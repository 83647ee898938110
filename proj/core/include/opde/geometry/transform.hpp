#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace opde::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rotations about the principal axes. Angles in degrees; multiples of 90
/// degrees produce exact entries.
Mat3 rot_x(double deg);
Mat3 rot_y(double deg);
Mat3 rot_z(double deg);

/// Rotation of `deg` degrees about a (not necessarily unit) axis.
Mat3 axis_angle(const Vec3& axis, double deg);

/// Angle in degrees of the relative rotation a^T b, in [0, 180].
double geodesic_deg(const Mat3& a, const Mat3& b);

/// Rigid transform x -> R x + t with R in SO(3).
class RigidTransform {
 public:
  static constexpr double kOrthonormalTolerance = 1e-6;

  RigidTransform();
  /// Throws DomainError when `rotation` is not orthonormal with det +1.
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_matrix(const Mat4& m);
  static RigidTransform from_rotation(const Mat3& r) { return {r, Vec3::Zero()}; }
  static RigidTransform from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat4 matrix() const;

  RigidTransform inverse() const;
  RigidTransform operator*(const RigidTransform& rhs) const;
  Vec3 operator*(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

  bool operator==(const RigidTransform& other) const = default;

 private:
  struct Unchecked {};
  RigidTransform(const Mat3& rotation, const Vec3& translation, Unchecked)
      : rotation_(rotation), translation_(translation) {}

  Mat3 rotation_;
  Vec3 translation_;
};

/// Reads 16 whitespace separated numbers (4x4 row-major). The bottom row must
/// be 0 0 0 1.
RigidTransform read_transform(std::istream& in);
RigidTransform read_transform_file(const std::string& path);
void write_transform(std::ostream& out, const RigidTransform& t);
void write_transform_file(const std::string& path, const RigidTransform& t);

}  // namespace opde::geometry
