#include "fof/surface.hpp"

#include "mc_tables.hpp"

#include <unordered_map>

namespace fof {

GridCoordsMap::GridCoordsMap(int w, int h, int k) : width(w), height(h), depth(k) {
  if (w < 2 || h < 2 || k < 2) {
    throw std::invalid_argument("occupancy grid needs at least 2 samples per axis");
  }
}

namespace {

// Corner c of a cell: bottom face 0-1-2-3 counter-clockwise, top face 4-7
// above it.
constexpr int corner_offset[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                     {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int edge_corners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                     {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

template <typename Scalar>
TriangleMesh marching_cubes_index_space(const OccupancyGrid<Scalar>& grid, double iso) {
  const GridCoordsMap map(grid.width, grid.height, grid.depth);  // validates dimensions
  const int W = grid.width;
  const int H = grid.height;
  const int K = grid.depth;
  if (grid.values.rows() != static_cast<Eigen::Index>(W) * H || grid.values.cols() != K) {
    throw std::invalid_argument("occupancy values do not match the grid dimensions");
  }

  std::vector<double> coords;
  std::vector<int> indices;
  std::unordered_map<std::int64_t, int> welded;

  // Edge key: lower corner's linear id * 3 + axis.
  const auto corner_id = [&](int i, int j, int k) {
    return (static_cast<std::int64_t>(j) * W + i) * K + k;
  };

  double value[8];
  int edge_vertex[12];
  for (int j = 0; j + 1 < H; ++j) {
    for (int i = 0; i + 1 < W; ++i) {
      const Scalar* col[2][2];
      for (int dj = 0; dj < 2; ++dj) {
        for (int di = 0; di < 2; ++di) {
          col[dj][di] = grid.values.data() + (static_cast<Eigen::Index>(j + dj) * W + (i + di)) * K;
        }
      }
      for (int k = 0; k + 1 < K; ++k) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          const auto& o = corner_offset[c];
          value[c] = static_cast<double>(col[o[1]][o[0]][k + o[2]]);
          if (!(value[c] > iso)) cube |= 1 << c;
        }
        const int edges = detail::mc_edge_table[cube];
        if (edges == 0) continue;

        for (int e = 0; e < 12; ++e) {
          if (!(edges & (1 << e))) continue;
          int a = edge_corners[e][0];
          int b = edge_corners[e][1];
          const auto& oa = corner_offset[a];
          const auto& ob = corner_offset[b];
          // Orient the edge from its lower to its upper lattice corner.
          int axis = 0;
          for (int d = 0; d < 3; ++d) {
            if (oa[d] != ob[d]) axis = d;
          }
          if (oa[axis] > ob[axis]) std::swap(a, b);
          const auto& lo = corner_offset[a];
          const std::int64_t key =
              corner_id(i + lo[0], j + lo[1], k + lo[2]) * 3 + axis;
          const auto [it, inserted] =
              welded.try_emplace(key, static_cast<int>(coords.size() / 3));
          if (inserted) {
            const double t = (iso - value[a]) / (value[b] - value[a]);
            double p[3] = {static_cast<double>(i + lo[0]), static_cast<double>(j + lo[1]),
                           static_cast<double>(k + lo[2])};
            p[axis] += t;
            coords.insert(coords.end(), p, p + 3);
          }
          edge_vertex[e] = it->second;
        }
        const signed char* tri = detail::mc_tri_table[cube];
        for (int t = 0; tri[t] != -1; t += 3) {
          indices.push_back(edge_vertex[tri[t]]);
          indices.push_back(edge_vertex[tri[t + 1]]);
          indices.push_back(edge_vertex[tri[t + 2]]);
        }
      }
    }
  }

  TriangleMesh mesh;
  mesh.vertices = Eigen::Map<const VertexMatrix>(coords.data(),
                                                 static_cast<Eigen::Index>(coords.size() / 3), 3);
  mesh.faces = Eigen::Map<const FaceMatrix>(indices.data(),
                                            static_cast<Eigen::Index>(indices.size() / 3), 3);
  return mesh;
}

template <typename Scalar>
TriangleMesh marching_cubes(const OccupancyGrid<Scalar>& grid, double iso) {
  TriangleMesh mesh = marching_cubes_index_space(grid, iso);
  const GridCoordsMap map(grid.width, grid.height, grid.depth);
  mesh.vertices = ((mesh.vertices.array().rowwise() * map.scale().transpose().array()).rowwise() +
                   map.offset().transpose().array())
                      .matrix();
  if (!map.preserves_orientation()) mesh.faces.col(1).swap(mesh.faces.col(2));
  return mesh;
}

template TriangleMesh marching_cubes_index_space(const OccupancyGrid<float>&, double);
template TriangleMesh marching_cubes_index_space(const OccupancyGrid<double>&, double);
template TriangleMesh marching_cubes(const OccupancyGrid<float>&, double);
template TriangleMesh marching_cubes(const OccupancyGrid<double>&, double);

}  // namespace fof
