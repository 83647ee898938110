#pragma once

#include <string>

#include "opde/geometry/mesh.hpp"

namespace opde::synth {

enum class ObjectKind {
  plain,                 // featureless cylinder
  cylinder_with_recess,  // pocket in the side wall, off the mid-plane
  cylinder_with_indent,  // pocket in the bottom cap, off the axis
};

/// Parametric stand-in for a cylindrical part. The symmetry axis is z and the
/// origin is the center of the cylinder.
struct ObjectSpec {
  ObjectKind kind = ObjectKind::cylinder_with_recess;
  double radius = 0.01;
  double height = 0.03;
  double feature_size = 0.004;
  /// Recess: height of the pocket center as a fraction of `height` (from the
  /// mid-plane). Indent: radial distance of the pocket center as a fraction
  /// of `radius`. The pocket is always centered at azimuth 0.
  double feature_position = 0.25;
  int segments = 256;

  double bounding_radius() const;
  double feature_depth() const { return 0.75 * feature_size; }
};

std::string to_string(ObjectKind kind);
ObjectKind parse_object_kind(const std::string& name);

/// Parses "recess", "indent", "plain" optionally followed by ":key=value,..."
/// with keys radius, height, feature, position, segments.
ObjectSpec parse_object_spec(const std::string& text);
std::string format_object_spec(const ObjectSpec& spec);

/// Watertight mesh; faces of the pocket carry tag 1. Throws DomainError for
/// non-positive dimensions, feature_size >= radius or a pocket that does not
/// fit on its face.
geometry::TriangleMesh make_object_mesh(const ObjectSpec& spec);

}  // namespace opde::synth
