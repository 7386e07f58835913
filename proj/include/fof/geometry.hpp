#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fof {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using VertexMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Raised when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed file contents (bad records, bad headers, truncation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Indexed triangle surface. Coordinates are unitless; after normalize_mesh
/// they lie in the canonical cube [-1, 1]^3.
struct TriangleMesh {
  VertexMatrix vertices;
  FaceMatrix faces;

  Eigen::Index num_vertices() const { return vertices.rows(); }
  Eigen::Index num_faces() const { return faces.rows(); }
  bool empty() const { return faces.rows() == 0; }

  Vec3 vertex(Eigen::Index v) const { return vertices.row(v).transpose(); }
  std::array<Vec3, 3> triangle(Eigen::Index f) const {
    return {vertex(faces(f, 0)), vertex(faces(f, 1)), vertex(faces(f, 2))};
  }
};

struct PointSample {
  Vec3 position = Vec3::Zero();
  std::optional<Vec3> normal;
};

using PointSamples = std::vector<PointSample>;

/// Throws std::invalid_argument when a face index is out of range or a
/// coordinate is not finite.
void validate_mesh(const TriangleMesh& mesh);

TriangleMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Uniform scale + translation so the bounding box is centred at the origin
/// and its longest axis spans 2 * (1 - margin).
TriangleMesh normalize_mesh(const TriangleMesh& mesh, double margin = 0.05);

struct BoundingBox {
  Vec3 min;
  Vec3 max;
  Vec3 extent() const { return max - min; }
};
BoundingBox bounding_box(const TriangleMesh& mesh);

TriangleMesh translate(const TriangleMesh& mesh, const Vec3& offset);
TriangleMesh scale(const TriangleMesh& mesh, double factor);

double surface_area(const TriangleMesh& mesh);
/// Divergence-theorem volume; positive for outward-oriented closed meshes.
double signed_volume(const TriangleMesh& mesh);
/// Every undirected edge is used by exactly two faces, once in each direction.
bool is_watertight(const TriangleMesh& mesh);
/// Unit face normal from winding; zero for degenerate faces.
Vec3 face_normal(const TriangleMesh& mesh, Eigen::Index f);

// Synthetic shapes -----------------------------------------------------------

enum class ShapeKind { Sphere, Box, Slab, Torus, Figure };

/// Parsed `kind:key=value,...` shape description, e.g. `sphere:r=0.6,level=5`.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Sphere;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const;
  static ShapeSpec parse(const std::string& text);
  std::string to_string() const;
};

/// Watertight, outward-oriented shape centred at the origin.
///
///   sphere  r (0.6), level (4)           icosphere subdivided `level` times
///   box     hx, hy, hz (0.5)             12 triangles
///   slab    t (0.02), e (0.8)            box of half-extents (e, e, t/2)
///   torus   R (0.5), r (0.2), level (5)  ring in the xy-plane; level sets the
///                                        tessellation density
///   figure  level (3)                    standing torus + three spheres,
///                                        up to 5 layers along z
TriangleMesh make_shape(const ShapeSpec& spec);
TriangleMesh make_sphere(double radius, int level);
TriangleMesh make_box(const Vec3& half_extents);
TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments,
                        int minor_segments);

/// Concatenates meshes, offsetting face indices.
TriangleMesh merge_meshes(const std::vector<TriangleMesh>& parts);

// Surface sampling -----------------------------------------------------------

/// Area-uniform samples: triangle chosen proportionally to area through a
/// cumulative table, then a uniform barycentric point. Normals follow face
/// winding. Deterministic for a given seed.
PointSamples sample_surface_points(const TriangleMesh& mesh, std::size_t count,
                                   std::uint64_t seed);

/// Same as sample_surface_points but also reports the source face per sample.
PointSamples sample_surface_points(const TriangleMesh& mesh, std::size_t count,
                                   std::uint64_t seed, std::vector<int>* source_faces);

/// Positions as an n x 3 matrix.
VertexMatrix positions_of(const PointSamples& samples);

}  // namespace fof
