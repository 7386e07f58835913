#pragma once

#include "fof/codec.hpp"
#include "fof/geometry.hpp"

namespace fof {

/// Affine map between occupancy-grid index space (i, j, k) and the canonical
/// cube: x = 2(i + 0.5)/W - 1, y = 1 - 2(j + 0.5)/H, z = -1 + 2k/(K - 1).
/// The y axis is mirrored (image rows grow downward), so the map reverses
/// orientation.
struct GridCoordsMap {
  int width = 0;
  int height = 0;
  int depth = 0;

  GridCoordsMap(int w, int h, int k);

  Vec3 scale() const { return {2.0 / width, -2.0 / height, 2.0 / (depth - 1)}; }
  Vec3 offset() const { return {1.0 / width - 1.0, 1.0 - 1.0 / height, -1.0}; }
  Vec3 to_world(const Vec3& index) const {
    return index.cwiseProduct(scale()) + offset();
  }
  Vec3 to_index(const Vec3& world) const {
    return (world - offset()).cwiseQuotient(scale());
  }
  bool preserves_orientation() const { return scale().prod() > 0.0; }
};

/// Lookup-table marching cubes returning vertices in index space. Corners
/// with value > iso are inside; triangles face toward lower values. Vertices
/// are shared through edge-keyed welding; cells are visited in (j, i, k)
/// order, so indexing is deterministic.
template <typename Scalar>
TriangleMesh marching_cubes_index_space(const OccupancyGrid<Scalar>& grid, double iso);

/// marching_cubes_index_space mapped into the canonical cube with outward
/// orientation preserved.
template <typename Scalar>
TriangleMesh marching_cubes(const OccupancyGrid<Scalar>& grid, double iso = 0.5);

/// Resize to W' x H' if needed, decode K depth samples, then marching cubes
/// at 0.5.
template <typename Scalar>
TriangleMesh extract_mesh(const FofGrid<Scalar>& fof, int width, int height, int samples) {
  const FofGrid<Scalar> sized =
      (width == fof.width() && height == fof.height()) ? fof : resize_fof(fof, width, height);
  return marching_cubes(decode_occupancy(sized, samples), 0.5);
}

extern template TriangleMesh marching_cubes_index_space(const OccupancyGrid<float>&, double);
extern template TriangleMesh marching_cubes_index_space(const OccupancyGrid<double>&, double);
extern template TriangleMesh marching_cubes(const OccupancyGrid<float>&, double);
extern template TriangleMesh marching_cubes(const OccupancyGrid<double>&, double);

}  // namespace fof
