#include "fof/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace fof {

void validate_mesh(const TriangleMesh& mesh) {
  if (!mesh.vertices.allFinite()) {
    throw std::invalid_argument("mesh has non-finite vertex coordinates");
  }
  const auto n = static_cast<int>(mesh.num_vertices());
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.faces(f, c);
      if (v < 0 || v >= n) {
        throw std::invalid_argument("face " + std::to_string(f) + " references vertex " +
                                    std::to_string(v) + " of " + std::to_string(n));
      }
    }
  }
}

BoundingBox bounding_box(const TriangleMesh& mesh) {
  if (mesh.num_vertices() == 0) {
    throw std::invalid_argument("bounding box of an empty mesh");
  }
  return {mesh.vertices.colwise().minCoeff().transpose(),
          mesh.vertices.colwise().maxCoeff().transpose()};
}

TriangleMesh normalize_mesh(const TriangleMesh& mesh, double margin) {
  if (mesh.num_vertices() == 0 || mesh.num_faces() == 0) {
    throw std::invalid_argument("cannot normalize an empty mesh");
  }
  if (!(margin >= 0.0 && margin < 1.0)) {
    throw std::invalid_argument("normalization margin must lie in [0, 1)");
  }
  validate_mesh(mesh);
  const BoundingBox box = bounding_box(mesh);
  const double longest = box.extent().maxCoeff();
  if (!(longest > 0.0)) {
    throw std::invalid_argument("mesh bounding box has zero extent");
  }
  const Vec3 center = 0.5 * (box.min + box.max);
  const double factor = 2.0 * (1.0 - margin) / longest;

  TriangleMesh out = mesh;
  out.vertices = ((mesh.vertices.rowwise() - center.transpose()) * factor).eval();
  return out;
}

TriangleMesh translate(const TriangleMesh& mesh, const Vec3& offset) {
  TriangleMesh out = mesh;
  out.vertices.rowwise() += offset.transpose();
  return out;
}

TriangleMesh scale(const TriangleMesh& mesh, double factor) {
  TriangleMesh out = mesh;
  out.vertices *= factor;
  return out;
}

double surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    const auto [a, b, c] = mesh.triangle(f);
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  return area;
}

double signed_volume(const TriangleMesh& mesh) {
  double volume = 0.0;
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    const auto [a, b, c] = mesh.triangle(f);
    volume += a.dot(b.cross(c));
  }
  return volume / 6.0;
}

bool is_watertight(const TriangleMesh& mesh) {
  // Directed edge (u -> v) counts; a closed, consistently oriented 2-manifold
  // uses every directed edge exactly once and its reverse exactly once.
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(static_cast<std::size_t>(mesh.num_faces()) * 3);
  const auto key = [](std::uint32_t u, std::uint32_t v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
  };
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const auto u = static_cast<std::uint32_t>(mesh.faces(f, c));
      const auto v = static_cast<std::uint32_t>(mesh.faces(f, (c + 1) % 3));
      if (u == v) return false;
      if (++directed[key(u, v)] > 1) return false;
    }
  }
  for (const auto& [k, count] : directed) {
    const auto u = static_cast<std::uint32_t>(k >> 32);
    const auto v = static_cast<std::uint32_t>(k & 0xffffffffu);
    if (!directed.contains(key(v, u))) return false;
  }
  return mesh.num_faces() > 0;
}

Vec3 face_normal(const TriangleMesh& mesh, Eigen::Index f) {
  const auto [a, b, c] = mesh.triangle(f);
  const Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

TriangleMesh merge_meshes(const std::vector<TriangleMesh>& parts) {
  Eigen::Index nv = 0;
  Eigen::Index nf = 0;
  for (const auto& p : parts) {
    nv += p.num_vertices();
    nf += p.num_faces();
  }
  TriangleMesh out;
  out.vertices.resize(nv, 3);
  out.faces.resize(nf, 3);
  Eigen::Index vo = 0;
  Eigen::Index fo = 0;
  for (const auto& p : parts) {
    out.vertices.middleRows(vo, p.num_vertices()) = p.vertices;
    out.faces.middleRows(fo, p.num_faces()) = p.faces.array() + static_cast<int>(vo);
    vo += p.num_vertices();
    fo += p.num_faces();
  }
  return out;
}

PointSamples sample_surface_points(const TriangleMesh& mesh, std::size_t count,
                                   std::uint64_t seed) {
  return sample_surface_points(mesh, count, seed, nullptr);
}

PointSamples sample_surface_points(const TriangleMesh& mesh, std::size_t count,
                                   std::uint64_t seed, std::vector<int>* source_faces) {
  if (mesh.empty()) {
    throw std::invalid_argument("cannot sample an empty mesh");
  }
  if (count == 0) {
    throw std::invalid_argument("sample count must be positive");
  }
  validate_mesh(mesh);

  std::vector<double> cumulative(static_cast<std::size_t>(mesh.num_faces()));
  double total = 0.0;
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    const auto [a, b, c] = mesh.triangle(f);
    total += 0.5 * (b - a).cross(c - a).norm();
    cumulative[static_cast<std::size_t>(f)] = total;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("cannot sample a mesh with zero surface area");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PointSamples samples;
  samples.reserve(count);
  if (source_faces != nullptr) {
    source_faces->clear();
    source_faces->reserve(count);
  }
  for (std::size_t s = 0; s < count; ++s) {
    const double target = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    // Zero-area faces share their predecessor's cumulative value and are
    // never selected by upper_bound.
    const auto f = static_cast<Eigen::Index>(it - cumulative.begin());

    double u = unit(rng);
    double v = unit(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const auto [a, b, c] = mesh.triangle(f);
    PointSample p;
    p.position = a + u * (b - a) + v * (c - a);
    p.normal = face_normal(mesh, f);
    samples.push_back(p);
    if (source_faces != nullptr) source_faces->push_back(static_cast<int>(f));
  }
  return samples;
}

VertexMatrix positions_of(const PointSamples& samples) {
  VertexMatrix out(static_cast<Eigen::Index>(samples.size()), 3);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = samples[i].position.transpose();
  }
  return out;
}

}  // namespace fof
