#pragma once

#include "fof/geometry.hpp"

#include <atomic>
#include <filesystem>
#include <optional>
#include <vector>

namespace fof {

/// One inside-run of a view ray: the ray enters the solid at z_in and
/// leaves at z_out.
struct Interval {
  double z_in = 0.0;
  double z_out = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, pairwise-disjoint inside intervals along one view ray. Empty for
/// background pixels.
struct IntervalSet {
  std::vector<Interval> intervals;

  bool empty() const { return intervals.empty(); }
  std::size_t size() const { return intervals.size(); }
  /// Total inside length sum(z_out - z_in), accumulated in order.
  double inside_length() const;
  /// z_in < z_out for each pair and z_out(i) <= z_in(i + 1).
  bool is_valid() const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;
};

/// Per-pixel interval sets of a W x H view, row-major with row 0 at the top.
struct LayeredIntervalGrid {
  int width = 0;
  int height = 0;
  std::vector<IntervalSet> cells;
  /// Pixels whose hit count was odd; their last hit was dropped.
  std::size_t warnings = 0;

  const IntervalSet& at(int i, int j) const {
    return cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(i)];
  }
};

/// Centre of pixel (i, j): x = 2(i + 0.5)/W - 1, y = 1 - 2(j + 0.5)/H.
Vec2 pixel_to_xy(int i, int j, int width, int height);

/// Depth at which the ray {(x, y, z) : z in R} crosses triangle (a, b, c), or
/// nothing. Points on shared edges and vertices are owned by exactly one of
/// the triangles meeting there (ties resolved as if the ray were nudged by an
/// infinitesimal step in +x, then +y). Triangles whose xy projection has zero
/// area are never hit.
std::optional<double> intersect_view_ray(const Vec3& a, const Vec3& b, const Vec3& c, double x,
                                         double y);

/// Casts one +z ray through every pixel centre, pairs the sorted hit depths
/// (after merging hits closer than hit_merge_epsilon) into inside intervals.
LayeredIntervalGrid rasterize_intervals(const TriangleMesh& mesh, int width, int height);

inline constexpr double hit_merge_epsilon = 1e-9;

/// Exact 1D occupancy: 1 strictly inside an interval, 0.5 on an endpoint,
/// 0 elsewhere.
double interval_occupancy(const IntervalSet& set, double z);

/// Front-most surface per pixel: smallest hit depth along the +z ray.
struct FirstHit {
  double z = 0.0;
  int face = -1;
};
std::vector<std::optional<FirstHit>> rasterize_first_hits(const TriangleMesh& mesh, int width,
                                                          int height);

/// Debug dump with header `i,j,k,z_in,z_out`, one line per interval.
void write_intervals_csv(const LayeredIntervalGrid& grid, const std::filesystem::path& path);

}  // namespace fof
