#pragma once

#include "fof/geometry.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fof {

struct MetricReport {
  double chamfer = 0.0;
  double p2s = 0.0;
  double normal_error = 0.0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;

  static std::string csv_header() { return "chamfer,p2s,normal_error,sample_count,seed"; }
  std::string csv_row() const;
};

struct ZAlignment {
  PointSamples aligned;
  double offset = 0.0;
};

/// Shifts pred along z so both sets have the same mean z.
ZAlignment z_align(const PointSamples& pred, const PointSamples& gt);

/// Symmetric mean squared nearest-neighbour distance
///   d = mean_{x in pred} min_y |x - y|^2 + mean_{y in gt} min_x |x - y|^2.
double chamfer_sum(const PointSamples& pred, const PointSamples& gt);
/// Reported Chamfer distance sqrt(d / 2) for one pair.
double chamfer(const PointSamples& pred, const PointSamples& gt);
/// Test-set aggregate: average the per-pair d values first, then sqrt(mean / 2).
double chamfer_aggregate(std::span<const double> sums);

/// Mean exact distance from each point to the closest point on `gt`.
double point_to_surface(const VertexMatrix& points, const TriangleMesh& gt);
/// P2S from `count` area-uniform samples on pred.
double p2s(const TriangleMesh& pred, const TriangleMesh& gt, std::size_t count, std::uint64_t seed);
/// P2S from pred's vertices.
double p2s_vertices(const TriangleMesh& pred, const TriangleMesh& gt);

/// Orthographic normal map along the +z view rays: unit face normal of the
/// first surface each pixel-centre ray meets.
struct NormalImage {
  int width = 0;
  int height = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> normals;
  std::vector<std::uint8_t> covered;
};
NormalImage render_normal_image(const TriangleMesh& mesh, int width, int height);

/// Mean over pixels covered by either image of the L1 difference of the
/// normals; an uncovered pixel counts as the zero vector.
double normal_image_l1(const NormalImage& pred, const NormalImage& gt);
double normal_image_error(const TriangleMesh& pred, const TriangleMesh& gt, int width, int height);

struct MetricOptions {
  std::size_t sample_count = 100000;
  std::uint64_t seed = 0;
  int image_width = 256;
  int image_height = 256;
  bool p2s_from_vertices = false;
  bool align_z = true;
};

/// z-alignment, then Chamfer, P2S and normal-image error. The alignment
/// offset is applied to pred before P2S; the normal image ignores it.
MetricReport evaluate_meshes(const TriangleMesh& pred, const TriangleMesh& gt,
                             const MetricOptions& options);

}  // namespace fof
