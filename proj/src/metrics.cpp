#include "fof/metrics.hpp"

#include "fof/parallel.hpp"
#include "fof/raster.hpp"
#include "fof/spatial.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace fof {

std::string MetricReport::csv_row() const {
  std::ostringstream out;
  out.precision(9);
  out << chamfer << ',' << p2s << ',' << normal_error << ',' << sample_count << ',' << seed;
  return out.str();
}

namespace {

double mean_z(const PointSamples& points) {
  double sum = 0.0;
  for (const auto& p : points) sum += p.position.z();
  return sum / static_cast<double>(points.size());
}

// Mean over `queries` of the squared distance to the nearest point in `tree`.
double mean_nearest_squared(const KdTree& tree, const VertexMatrix& queries) {
  std::vector<double> d(static_cast<std::size_t>(queries.rows()));
  parallel_for(0, d.size(), [&](std::size_t q) {
    d[q] = tree.nearest(queries.row(static_cast<Eigen::Index>(q)).transpose()).squared_distance;
  });
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

void require_points(const PointSamples& pred, const PointSamples& gt) {
  if (pred.empty() || gt.empty()) throw std::invalid_argument("point sets must be non-empty");
}

}  // namespace

ZAlignment z_align(const PointSamples& pred, const PointSamples& gt) {
  require_points(pred, gt);
  ZAlignment out;
  out.offset = mean_z(gt) - mean_z(pred);
  out.aligned = pred;
  for (auto& p : out.aligned) p.position.z() += out.offset;
  return out;
}

double chamfer_sum(const PointSamples& pred, const PointSamples& gt) {
  require_points(pred, gt);
  const VertexMatrix p = positions_of(pred);
  const VertexMatrix g = positions_of(gt);
  return mean_nearest_squared(KdTree(g), p) + mean_nearest_squared(KdTree(p), g);
}

double chamfer(const PointSamples& pred, const PointSamples& gt) {
  return std::sqrt(chamfer_sum(pred, gt) / 2.0);
}

double chamfer_aggregate(std::span<const double> sums) {
  if (sums.empty()) throw std::invalid_argument("no Chamfer values to aggregate");
  const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(sums.size());
  return std::sqrt(mean / 2.0);
}

double point_to_surface(const VertexMatrix& points, const TriangleMesh& gt) {
  if (points.rows() == 0) throw std::invalid_argument("P2S needs at least one point");
  const TriangleBvh bvh(gt);
  std::vector<double> d(static_cast<std::size_t>(points.rows()));
  parallel_for(0, d.size(), [&](std::size_t q) {
    d[q] = bvh.closest(points.row(static_cast<Eigen::Index>(q)).transpose()).distance;
  });
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

double p2s(const TriangleMesh& pred, const TriangleMesh& gt, std::size_t count,
           std::uint64_t seed) {
  if (pred.empty() || gt.empty()) throw std::invalid_argument("P2S needs non-empty meshes");
  return point_to_surface(positions_of(sample_surface_points(pred, count, seed)), gt);
}

double p2s_vertices(const TriangleMesh& pred, const TriangleMesh& gt) {
  if (pred.empty() || gt.empty()) throw std::invalid_argument("P2S needs non-empty meshes");
  return point_to_surface(pred.vertices, gt);
}

NormalImage render_normal_image(const TriangleMesh& mesh, int width, int height) {
  NormalImage image;
  image.width = width;
  image.height = height;
  const auto hits = rasterize_first_hits(mesh, width, height);
  image.normals.setZero(static_cast<Eigen::Index>(hits.size()), 3);
  image.covered.assign(hits.size(), 0);
  for (std::size_t p = 0; p < hits.size(); ++p) {
    if (!hits[p]) continue;
    image.covered[p] = 1;
    image.normals.row(static_cast<Eigen::Index>(p)) = face_normal(mesh, hits[p]->face).transpose();
  }
  return image;
}

double normal_image_l1(const NormalImage& pred, const NormalImage& gt) {
  if (pred.width != gt.width || pred.height != gt.height) {
    throw std::invalid_argument("normal images differ in size");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < gt.covered.size(); ++p) {
    if (!pred.covered[p] && !gt.covered[p]) continue;
    const auto row = static_cast<Eigen::Index>(p);
    total += (pred.normals.row(row) - gt.normals.row(row)).cwiseAbs().sum();
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

double normal_image_error(const TriangleMesh& pred, const TriangleMesh& gt, int width,
                          int height) {
  if (pred.empty() || gt.empty()) {
    throw std::invalid_argument("normal image error needs non-empty meshes");
  }
  return normal_image_l1(render_normal_image(pred, width, height),
                         render_normal_image(gt, width, height));
}

MetricReport evaluate_meshes(const TriangleMesh& pred, const TriangleMesh& gt,
                             const MetricOptions& options) {
  if (pred.empty() || gt.empty()) throw std::invalid_argument("metrics need non-empty meshes");
  MetricReport report;
  report.sample_count = options.sample_count;
  report.seed = options.seed;

  // Same seed on both surfaces: identical meshes yield identical samples.
  const PointSamples gt_points = sample_surface_points(gt, options.sample_count, options.seed);
  PointSamples pred_points = sample_surface_points(pred, options.sample_count, options.seed);

  TriangleMesh pred_aligned = pred;
  if (options.align_z) {
    ZAlignment a = z_align(pred_points, gt_points);
    pred_points = std::move(a.aligned);
    pred_aligned = translate(pred, Vec3(0, 0, a.offset));
  }

  report.chamfer = chamfer(pred_points, gt_points);
  report.p2s = options.p2s_from_vertices ? p2s_vertices(pred_aligned, gt)
                                         : point_to_surface(positions_of(pred_points), gt);
  // A shift along the view axis leaves an orthographic normal map unchanged,
  // so the unshifted mesh is rendered (it stays inside the canonical cube).
  report.normal_error = normal_image_error(pred, gt, options.image_width, options.image_height);
  return report;
}

}  // namespace fof
