#include "fof/raster.hpp"

#include "fof/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <tuple>

namespace fof {

double IntervalSet::inside_length() const {
  double total = 0.0;
  for (const auto& iv : intervals) total += iv.z_out - iv.z_in;
  return total;
}

bool IntervalSet::is_valid() const {
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    if (!(intervals[k].z_in < intervals[k].z_out)) return false;
    if (k > 0 && !(intervals[k - 1].z_out <= intervals[k].z_in)) return false;
  }
  return true;
}

Vec2 pixel_to_xy(int i, int j, int width, int height) {
  if (width <= 0 || height <= 0 || i < 0 || i >= width || j < 0 || j >= height) {
    throw std::out_of_range("pixel index outside the grid");
  }
  return {2.0 * (i + 0.5) / width - 1.0, 1.0 - 2.0 * (j + 0.5) / height};
}

double interval_occupancy(const IntervalSet& set, double z) {
  for (const auto& iv : set.intervals) {
    if (z == iv.z_in || z == iv.z_out) return 0.5;
    if (z > iv.z_in && z < iv.z_out) return 1.0;
  }
  return 0.0;
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Signed area of (x, y) against the directed edge p -> q in the xy-plane.
// Evaluated with endpoints in lexicographic order so the two triangles on a
// shared edge see exactly negated values; zero is resolved by the sign of
// the directional derivative along the nudge direction (+x, then +y).
int edge_sign(const Vec3& p, const Vec3& q, double x, double y, double& value) {
  const bool swapped = std::tie(q.x(), q.y()) < std::tie(p.x(), p.y());
  const Vec3& u = swapped ? q : p;
  const Vec3& v = swapped ? p : q;
  const double dx = v.x() - u.x();
  const double dy = v.y() - u.y();
  double w = dx * (y - u.y()) - dy * (x - u.x());
  int s = sign_of(w);
  if (s == 0) s = (dy != 0.0) ? -sign_of(dy) : sign_of(dx);
  if (swapped) {
    w = -w;
    s = -s;
  }
  value = w;
  return s;
}

struct Hit {
  double z;
  int face;
};

// Calls visit(j, hits) once per image row, where hits[i] holds every ray/face
// crossing for pixel (i, j). Rows are independent and may run concurrently.
template <typename Visit>
void scatter_hits(const TriangleMesh& mesh, int width, int height, Visit&& visit) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("raster grid dimensions must be positive");
  }
  validate_mesh(mesh);
  constexpr double slack = 1e-6;
  if (mesh.num_vertices() > 0 && mesh.vertices.cwiseAbs().maxCoeff() > 1.0 + slack) {
    throw std::invalid_argument("mesh coordinates exceed the canonical cube [-1, 1]^3");
  }

  // Bin faces by the image rows their projected bounding box may cover.
  std::vector<std::vector<int>> row_faces(static_cast<std::size_t>(height));
  const double half_w = 0.5 * width;
  const double half_h = 0.5 * height;
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    const auto [a, b, c] = mesh.triangle(f);
    const double ymin = std::min({a.y(), b.y(), c.y()});
    const double ymax = std::max({a.y(), b.y(), c.y()});
    // y = 1 - 2(j + 0.5)/H  <=>  j = (1 - y) H/2 - 0.5
    const int j0 = std::max(0, static_cast<int>(std::floor((1.0 - ymax) * half_h - 0.5)));
    const int j1 = std::min(height - 1, static_cast<int>(std::ceil((1.0 - ymin) * half_h - 0.5)));
    for (int j = j0; j <= j1; ++j) row_faces[static_cast<std::size_t>(j)].push_back(static_cast<int>(f));
  }

  parallel_for(0, static_cast<std::size_t>(height), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    std::vector<std::vector<Hit>> hits(static_cast<std::size_t>(width));
    const double y = 1.0 - 2.0 * (j + 0.5) / height;
    for (const int f : row_faces[row]) {
      const auto [a, b, c] = mesh.triangle(f);
      const double xmin = std::min({a.x(), b.x(), c.x()});
      const double xmax = std::max({a.x(), b.x(), c.x()});
      const int i0 = std::max(0, static_cast<int>(std::floor((xmin + 1.0) * half_w - 0.5)));
      const int i1 = std::min(width - 1, static_cast<int>(std::ceil((xmax + 1.0) * half_w - 0.5)));
      for (int i = i0; i <= i1; ++i) {
        const double x = 2.0 * (i + 0.5) / width - 1.0;
        if (const auto z = intersect_view_ray(a, b, c, x, y)) {
          hits[static_cast<std::size_t>(i)].push_back({*z, f});
        }
      }
    }
    visit(j, hits);
  });
}

}  // namespace

std::optional<double> intersect_view_ray(const Vec3& a, const Vec3& b, const Vec3& c, double x,
                                         double y) {
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  if (det == 0.0) return std::nullopt;
  const int orientation = sign_of(det);

  double w0, w1, w2;
  if (edge_sign(b, c, x, y, w0) != orientation) return std::nullopt;
  if (edge_sign(c, a, x, y, w1) != orientation) return std::nullopt;
  if (edge_sign(a, b, x, y, w2) != orientation) return std::nullopt;

  const double sum = w0 + w1 + w2;
  if (sum == 0.0) return std::nullopt;
  return (w0 * a.z() + w1 * b.z() + w2 * c.z()) / sum;
}

LayeredIntervalGrid rasterize_intervals(const TriangleMesh& mesh, int width, int height) {
  LayeredIntervalGrid grid;
  grid.width = width;
  grid.height = height;
  if (width > 0 && height > 0) {
    grid.cells.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  }
  std::atomic<std::size_t> warnings{0};

  scatter_hits(mesh, width, height, [&](int j, std::vector<std::vector<Hit>>& hits) {
    std::size_t row_warnings = 0;
    std::vector<double> depths;
    for (int i = 0; i < width; ++i) {
      auto& pixel = hits[static_cast<std::size_t>(i)];
      if (pixel.empty()) continue;
      depths.clear();
      for (const Hit& h : pixel) depths.push_back(h.z);
      std::sort(depths.begin(), depths.end());
      std::size_t kept = 1;
      for (std::size_t k = 1; k < depths.size(); ++k) {
        if (depths[k] - depths[kept - 1] >= hit_merge_epsilon) depths[kept++] = depths[k];
      }
      depths.resize(kept);
      if (depths.size() % 2 != 0) {
        depths.pop_back();
        ++row_warnings;
      }
      auto& cell = grid.cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                              static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < depths.size(); k += 2) {
        cell.intervals.push_back({depths[k], depths[k + 1]});
      }
    }
    warnings.fetch_add(row_warnings, std::memory_order_relaxed);
  });

  grid.warnings = warnings.load();
  return grid;
}

std::vector<std::optional<FirstHit>> rasterize_first_hits(const TriangleMesh& mesh, int width,
                                                          int height) {
  std::vector<std::optional<FirstHit>> image(
      static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)));
  scatter_hits(mesh, width, height, [&](int j, std::vector<std::vector<Hit>>& hits) {
    for (int i = 0; i < width; ++i) {
      const auto& pixel = hits[static_cast<std::size_t>(i)];
      if (pixel.empty()) continue;
      // Ties on depth go to the lower face index so the result is order-free.
      const Hit best = *std::min_element(pixel.begin(), pixel.end(), [](const Hit& l, const Hit& r) {
        return std::tie(l.z, l.face) < std::tie(r.z, r.face);
      });
      image[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(i)] = FirstHit{best.z, best.face};
    }
  });
  return image;
}

void write_intervals_csv(const LayeredIntervalGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "i,j,k,z_in,z_out\n" << std::setprecision(17);
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const auto& set = grid.at(i, j);
      for (std::size_t k = 0; k < set.size(); ++k) {
        out << i << ',' << j << ',' << k << ',' << set.intervals[k].z_in << ','
            << set.intervals[k].z_out << '\n';
      }
    }
  }
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace fof
