#pragma once

#include "fof/geometry.hpp"

#include <Eigen/Geometry>

#include <cstdint>
#include <vector>

namespace fof {

/// Closest point of triangle (a, b, c) to p (Voronoi-region walk).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Static 3D kd-tree over a point set for exact nearest-neighbour queries.
class KdTree {
 public:
  struct Neighbor {
    Eigen::Index index = -1;
    double squared_distance = 0.0;
  };

  explicit KdTree(VertexMatrix points);

  /// Exact nearest neighbour; ties go to the smallest point index.
  Neighbor nearest(const Vec3& query) const;
  Eigen::Index size() const { return points_.rows(); }

 private:
  struct Node {
    // Leaf when axis < 0; [begin, end) indexes order_.
    int axis = -1;
    double split = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, int depth);
  void search(std::uint32_t node, const Vec3& query, Neighbor& best) const;

  VertexMatrix points_;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
};

/// Bounding-volume hierarchy over mesh triangles for exact point-to-surface
/// distance queries.
class TriangleBvh {
 public:
  struct Closest {
    int face = -1;
    double distance = 0.0;
    Vec3 point = Vec3::Zero();
  };

  explicit TriangleBvh(const TriangleMesh& mesh);

  /// Exact closest point; ties go to the smallest face index.
  Closest closest(const Vec3& query) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    std::uint32_t begin = 0;  // leaf range into faces_ when count > 0
    std::uint32_t count = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  TriangleMesh mesh_;
  std::vector<int> faces_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

}  // namespace fof
