#include "fof/geometry.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace fof {

namespace {

void flip_if_inverted(TriangleMesh& mesh) {
  if (signed_volume(mesh) < 0.0) mesh.faces.col(1).swap(mesh.faces.col(2));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("shape parameters out of range: " + what);
}

}  // namespace

double ShapeSpec::get(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

ShapeSpec ShapeSpec::parse(const std::string& text) {
  ShapeSpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "sphere") {
    spec.kind = ShapeKind::Sphere;
  } else if (kind == "box") {
    spec.kind = ShapeKind::Box;
  } else if (kind == "slab") {
    spec.kind = ShapeKind::Slab;
  } else if (kind == "torus") {
    spec.kind = ShapeKind::Torus;
  } else if (kind == "figure") {
    spec.kind = ShapeKind::Figure;
  } else {
    throw std::invalid_argument("unknown shape kind '" + kind + "'");
  }
  if (colon == std::string::npos) return spec;

  std::istringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("bad shape parameter '" + item + "'");
    }
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw std::invalid_argument("bad shape parameter value '" + item + "'");
    }
    spec.params[item.substr(0, eq)] = v;
  }
  return spec;
}

std::string ShapeSpec::to_string() const {
  static constexpr const char* names[] = {"sphere", "box", "slab", "torus", "figure"};
  std::ostringstream out;
  out << names[static_cast<int>(kind)];
  char sep = ':';
  for (const auto& [k, v] : params) {
    out << sep << k << '=' << v;
    sep = ',';
  }
  return out.str();
}

TriangleMesh make_sphere(double radius, int level) {
  require(radius > 0.0 && radius <= 1.0, "sphere radius must lie in (0, 1]");
  require(level >= 0 && level <= 8, "sphere level must lie in [0, 8]");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  std::vector<Eigen::Vector3i> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& v : verts) v.normalize();

  for (int l = 0; l < level; ++l) {
    std::unordered_map<std::uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                       static_cast<std::uint32_t>(std::max(a, b));
      const auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(verts.size()));
      if (inserted) verts.push_back((verts[a] + verts[b]).normalized());
      return it->second;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.emplace_back(f[0], ab, ca);
      next.emplace_back(f[1], bc, ab);
      next.emplace_back(f[2], ca, bc);
      next.emplace_back(ab, bc, ca);
    }
    faces.swap(next);
  }

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    mesh.vertices.row(static_cast<Eigen::Index>(i)) = radius * verts[i].transpose();
  }
  mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    mesh.faces.row(static_cast<Eigen::Index>(i)) = faces[i].transpose();
  }
  flip_if_inverted(mesh);
  return mesh;
}

TriangleMesh make_box(const Vec3& half_extents) {
  require((half_extents.array() > 0.0).all() && (half_extents.array() <= 1.0).all(),
          "box half-extents must lie in (0, 1]");
  TriangleMesh mesh;
  mesh.vertices.resize(8, 3);
  for (int c = 0; c < 8; ++c) {
    mesh.vertices.row(c) << ((c & 1) ? 1 : -1) * half_extents.x(),
        ((c & 2) ? 1 : -1) * half_extents.y(), ((c & 4) ? 1 : -1) * half_extents.z();
  }
  // Quads listed counter-clockwise when seen from outside.
  const int quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  mesh.faces.resize(12, 3);
  for (int q = 0; q < 6; ++q) {
    mesh.faces.row(2 * q) << quads[q][0], quads[q][1], quads[q][2];
    mesh.faces.row(2 * q + 1) << quads[q][0], quads[q][2], quads[q][3];
  }
  return mesh;
}

TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments,
                        int minor_segments) {
  require(minor_radius > 0.0 && minor_radius < major_radius, "torus needs 0 < r < R");
  require(major_radius + minor_radius <= 1.0, "torus must fit in the unit cube (R + r <= 1)");
  require(major_segments >= 3 && minor_segments >= 3, "torus needs >= 3 segments per ring");

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(major_segments) * minor_segments, 3);
  mesh.faces.resize(2 * static_cast<Eigen::Index>(major_segments) * minor_segments, 3);
  const double two_pi = 2.0 * std::numbers::pi;
  auto index = [&](int u, int v) {
    return (u % major_segments) * minor_segments + (v % minor_segments);
  };
  for (int u = 0; u < major_segments; ++u) {
    const double phi = two_pi * u / major_segments;
    for (int v = 0; v < minor_segments; ++v) {
      const double theta = two_pi * v / minor_segments;
      const double ring = major_radius + minor_radius * std::cos(theta);
      mesh.vertices.row(index(u, v)) << ring * std::cos(phi), ring * std::sin(phi),
          minor_radius * std::sin(theta);
    }
  }
  Eigen::Index f = 0;
  for (int u = 0; u < major_segments; ++u) {
    for (int v = 0; v < minor_segments; ++v) {
      const int a = index(u, v), b = index(u + 1, v), c = index(u + 1, v + 1),
                d = index(u, v + 1);
      mesh.faces.row(f++) << a, b, c;
      mesh.faces.row(f++) << a, c, d;
    }
  }
  flip_if_inverted(mesh);
  return mesh;
}

TriangleMesh make_shape(const ShapeSpec& spec) {
  switch (spec.kind) {
    case ShapeKind::Sphere:
      return make_sphere(spec.get("r", 0.6), static_cast<int>(spec.get("level", 4)));
    case ShapeKind::Box:
      return make_box(Vec3(spec.get("hx", 0.5), spec.get("hy", 0.5), spec.get("hz", 0.5)));
    case ShapeKind::Slab: {
      const double t = spec.get("t", 0.02);
      const double e = spec.get("e", 0.8);
      return make_box(Vec3(e, e, 0.5 * t));
    }
    case ShapeKind::Torus: {
      const int level = static_cast<int>(spec.get("level", 5));
      require(level >= 1 && level <= 16, "torus level must lie in [1, 16]");
      return make_torus(spec.get("R", 0.5), spec.get("r", 0.2), 24 * level, 12 * level);
    }
    case ShapeKind::Figure: {
      const int level = static_cast<int>(spec.get("level", 3));
      require(level >= 1 && level <= 6, "figure level must lie in [1, 6]");
      // Standing ring in the xz-plane, so view rays along z cross it twice.
      TriangleMesh ring = make_torus(0.6, 0.1, 24 * level, 8 * level);
      const Eigen::Matrix3d rot = Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitX()).matrix();
      ring.vertices = (ring.vertices * rot.transpose()).eval();
      return merge_meshes({ring, make_sphere(0.3, level + 1),
                           translate(make_sphere(0.06, level), Vec3(0, 0, 0.41)),
                           translate(make_sphere(0.06, level), Vec3(0, 0, -0.41))});
    }
  }
  throw std::invalid_argument("unknown shape kind");
}

}  // namespace fof
