#include "opde/synth/object_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "opde/error.hpp"

namespace opde::synth {

using geometry::TriangleMesh;
using geometry::Vec3;

double ObjectSpec::bounding_radius() const { return std::hypot(radius, 0.5 * height); }

std::string to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::plain: return "plain";
    case ObjectKind::cylinder_with_recess: return "recess";
    case ObjectKind::cylinder_with_indent: return "indent";
  }
  return "unknown";
}

ObjectKind parse_object_kind(const std::string& name) {
  if (name == "plain" || name == "cylinder") return ObjectKind::plain;
  if (name == "recess" || name == "cylinder_with_recess") return ObjectKind::cylinder_with_recess;
  if (name == "indent" || name == "cylinder_with_indent") return ObjectKind::cylinder_with_indent;
  throw DomainError("unknown object kind: " + name);
}

ObjectSpec parse_object_spec(const std::string& text) {
  const auto colon = text.find(':');
  ObjectSpec spec;
  spec.kind = parse_object_kind(text.substr(0, colon));
  if (spec.kind == ObjectKind::cylinder_with_indent) spec.feature_position = 0.5;
  if (colon == std::string::npos) return spec;

  std::istringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError("object spec: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw DomainError("object spec: bad number in '" + item + "'");
    }
    if (key == "radius") spec.radius = value;
    else if (key == "height") spec.height = value;
    else if (key == "feature") spec.feature_size = value;
    else if (key == "position") spec.feature_position = value;
    else if (key == "segments") spec.segments = static_cast<int>(value);
    else throw DomainError("object spec: unknown key '" + key + "'");
  }
  return spec;
}

std::string format_object_spec(const ObjectSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << to_string(spec.kind) << ":radius=" << spec.radius << ",height=" << spec.height
      << ",feature=" << spec.feature_size << ",position=" << spec.feature_position
      << ",segments=" << spec.segments;
  return out.str();
}

namespace {

// Sorted levels in [lo, hi] with roughly `step` spacing that contain every
// value of `required`.
std::vector<double> levels(double lo, double hi, double step, std::vector<double> required) {
  std::vector<double> out{lo, hi};
  out.insert(out.end(), required.begin(), required.end());
  std::sort(out.begin(), out.end());
  std::vector<double> filled;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    const double a = out[i];
    const double b = out[i + 1];
    if (b - a <= 0.0) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / step - 1e-9)));
    for (int p = 0; p < pieces; ++p) filled.push_back(a + (b - a) * p / pieces);
  }
  filled.push_back(out.back());
  return filled;
}

int index_of_level(const std::vector<double>& lv, double value) {
  const auto it = std::min_element(lv.begin(), lv.end(), [&](double a, double b) {
    return std::abs(a - value) < std::abs(b - value);
  });
  return static_cast<int>(it - lv.begin());
}

// A periodic (row, segment) vertex lattice on one face of the cylinder.
struct Lattice {
  std::vector<std::vector<int>> ids;  // [row][segment]
  int segments = 0;
  bool flip = false;                  // reverse the default winding

  int at(int row, int j) const {
    return ids[static_cast<std::size_t>(row)][static_cast<std::size_t>(((j % segments) + segments) % segments)];
  }
  // Cell between rows (r, r+1) and segments (j, j+1), outward CCW.
  std::array<int, 4> cell(int r, int j) const {
    std::array<int, 4> q{at(r, j), at(r, j + 1), at(r + 1, j + 1), at(r + 1, j)};
    if (flip) std::reverse(q.begin(), q.end());
    return q;
  }
};

struct PocketWindow {
  int row_begin = 0, row_end = 0;  // cell rows [row_begin, row_end)
  int seg_begin = 0, seg_count = 0;
  bool contains(int r, int j, int segments) const {
    const int rel = (((j - seg_begin) % segments) + segments) % segments;
    return r >= row_begin && r < row_end && rel < seg_count;
  }
};

// Emits the cells of `lat`, replacing `window` (if any) with a pocket whose
// floor vertices come from `floor_vertex(row, segment)`.
template <typename FloorFn>
void emit_lattice(TriangleMesh& mesh, const Lattice& lat, int rows, const PocketWindow* window,
                  FloorFn floor_vertex) {
  std::map<int, int> floor_of;
  std::set<std::pair<int, int>> pocket_edges;
  std::vector<std::array<int, 4>> pocket_cells;
  for (int r = 0; r + 1 < rows; ++r) {
    for (int j = 0; j < lat.segments; ++j) {
      const auto q = lat.cell(r, j);
      if (window != nullptr && window->contains(r, j, lat.segments)) {
        pocket_cells.push_back(q);
        // floor vertices for the four corners
        const std::array<std::pair<int, int>, 4> rc{{{r, j}, {r, j + 1}, {r + 1, j + 1}, {r + 1, j}}};
        for (const auto& [rr, jj] : rc) {
          const int v = lat.at(rr, jj);
          if (!floor_of.contains(v)) floor_of[v] = mesh.add_vertex(floor_vertex(rr, jj));
        }
        for (int k = 0; k < 4; ++k) pocket_edges.insert({q[static_cast<std::size_t>(k)], q[static_cast<std::size_t>((k + 1) % 4)]});
      } else {
        mesh.add_quad(q[0], q[1], q[2], q[3]);
      }
    }
  }
  for (const auto& q : pocket_cells) {
    mesh.add_quad(floor_of[q[0]], floor_of[q[1]], floor_of[q[2]], floor_of[q[3]], 1);
  }
  for (const auto& [a, b] : pocket_edges) {
    if (pocket_edges.contains({b, a})) continue;
    mesh.add_quad(a, b, floor_of[b], floor_of[a], 1);
  }
}

}  // namespace

TriangleMesh make_object_mesh(const ObjectSpec& spec) {
  if (!(spec.radius > 0.0) || !(spec.height > 0.0) || spec.segments < 8) {
    throw DomainError("make_object_mesh: radius and height must be positive and segments >= 8");
  }
  const bool has_feature = spec.kind != ObjectKind::plain;
  if (has_feature && (!(spec.feature_size > 0.0) || spec.feature_size >= spec.radius)) {
    throw DomainError("make_object_mesh: need 0 < feature_size < radius");
  }

  const int n = spec.segments;
  const double r = spec.radius;
  const double half_h = 0.5 * spec.height;
  const double fs = spec.feature_size;
  const double depth = spec.feature_depth();
  const double seg_angle = 2.0 * std::numbers::pi / n;

  std::vector<double> required_z;
  std::vector<double> required_rho;
  PocketWindow side_window;
  PocketWindow cap_window;
  if (spec.kind == ObjectKind::cylinder_with_recess) {
    const double zc = spec.feature_position * spec.height;
    if (zc - fs / 2 <= -half_h || zc + fs / 2 >= half_h || depth >= r) {
      throw DomainError("make_object_mesh: recess does not fit on the side wall");
    }
    required_z = {zc - fs / 2, zc + fs / 2};
    const int half_segs = std::max(1, static_cast<int>(std::lround(fs / 2 / r / seg_angle)));
    side_window.seg_begin = n - half_segs;
    side_window.seg_count = 2 * half_segs;
  } else if (spec.kind == ObjectKind::cylinder_with_indent) {
    const double rc = spec.feature_position * r;
    if (rc - fs / 2 <= 0.05 * r || rc + fs / 2 >= r || depth >= spec.height) {
      throw DomainError("make_object_mesh: indent does not fit on the bottom cap");
    }
    required_rho = {rc - fs / 2, rc + fs / 2};
    const int half_segs = std::max(1, static_cast<int>(std::lround(fs / 2 / rc / seg_angle)));
    cap_window.seg_begin = n - half_segs;
    cap_window.seg_count = 2 * half_segs;
  }

  const std::vector<double> zs = levels(-half_h, half_h, spec.height / 12.0, required_z);
  // cap rings exclude the center (handled by a fan) and end at the rim.
  std::vector<double> rhos = levels(0.0, r, r / 6.0, required_rho);
  rhos.erase(rhos.begin());

  if (spec.kind == ObjectKind::cylinder_with_recess) {
    side_window.row_begin = index_of_level(zs, required_z[0]);
    side_window.row_end = index_of_level(zs, required_z[1]);
  } else if (spec.kind == ObjectKind::cylinder_with_indent) {
    cap_window.row_begin = index_of_level(rhos, required_rho[0]);
    cap_window.row_end = index_of_level(rhos, required_rho[1]);
  }

  TriangleMesh mesh;
  auto ring_point = [&](double rho, int j, double z) {
    const double a = j * seg_angle;
    return Vec3(rho * std::cos(a), rho * std::sin(a), z);
  };

  Lattice side;
  side.segments = n;
  for (double z : zs) {
    std::vector<int> row(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = mesh.add_vertex(ring_point(r, j, z));
    side.ids.push_back(std::move(row));
  }

  // Cap lattices run from the innermost ring outward; their last row is the
  // side wall's bottom/top ring.
  auto make_cap = [&](double z, const std::vector<int>& rim, bool flip) {
    Lattice cap;
    cap.segments = n;
    cap.flip = flip;
    for (std::size_t m = 0; m + 1 < rhos.size(); ++m) {
      std::vector<int> row(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = mesh.add_vertex(ring_point(rhos[m], j, z));
      cap.ids.push_back(std::move(row));
    }
    cap.ids.push_back(rim);
    return cap;
  };
  const Lattice bottom = make_cap(-half_h, side.ids.front(), false);
  const Lattice top = make_cap(half_h, side.ids.back(), true);

  const int bottom_center = mesh.add_vertex(Vec3(0, 0, -half_h));
  const int top_center = mesh.add_vertex(Vec3(0, 0, half_h));
  for (int j = 0; j < n; ++j) {
    mesh.add_triangle(bottom_center, bottom.at(0, j + 1), bottom.at(0, j));
    mesh.add_triangle(top_center, top.at(0, j), top.at(0, j + 1));
  }

  emit_lattice(mesh, side, static_cast<int>(zs.size()),
               spec.kind == ObjectKind::cylinder_with_recess ? &side_window : nullptr,
               [&](int row, int j) { return ring_point(r - depth, j, zs[static_cast<std::size_t>(row)]); });
  emit_lattice(mesh, bottom, static_cast<int>(rhos.size()),
               spec.kind == ObjectKind::cylinder_with_indent ? &cap_window : nullptr,
               [&](int row, int j) { return ring_point(rhos[static_cast<std::size_t>(row)], j, -half_h + depth); });
  emit_lattice(mesh, top, static_cast<int>(rhos.size()), nullptr, [](int, int) { return Vec3::Zero().eval(); });
  return mesh;
}

}  // namespace opde::synth
