#include "fof/spatial.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <limits>
#include <numeric>

namespace fof {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return a + (d1 / (d1 - d3)) * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return a + (d2 / (d2 - d6)) * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = va + vb + vc;
  if (denom == 0.0) {
    // Degenerate (collinear) triangle: best of its three edges.
    auto on_segment = [&](const Vec3& s, const Vec3& t) {
      const Vec3 d = t - s;
      const double len2 = d.squaredNorm();
      const double u = len2 > 0.0 ? std::clamp((p - s).dot(d) / len2, 0.0, 1.0) : 0.0;
      return Vec3(s + u * d);
    };
    Vec3 best = on_segment(a, b);
    for (const Vec3& q : {on_segment(b, c), on_segment(c, a)}) {
      if ((q - p).squaredNorm() < (best - p).squaredNorm()) best = q;
    }
    return best;
  }
  const double v = vb / denom;
  const double w = vc / denom;
  return a + ab * v + ac * w;
}

// KdTree ---------------------------------------------------------------------

namespace {
constexpr std::uint32_t kd_leaf_size = 8;
}

KdTree::KdTree(VertexMatrix points) : points_(std::move(points)) {
  if (points_.rows() == 0) throw std::invalid_argument("kd-tree needs at least one point");
  order_.resize(static_cast<std::size_t>(points_.rows()));
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  nodes_.reserve(2 * order_.size() / kd_leaf_size + 1);
  build(0, static_cast<std::uint32_t>(order_.size()), 0);
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end, int depth) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kd_leaf_size || depth > 60) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  // Split the widest axis at the median.
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::uint32_t k = begin; k < end; ++k) {
    const Vec3 p = points_.row(order_[k]).transpose();
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](Eigen::Index l, Eigen::Index r) { return points_(l, axis) < points_(r, axis); });
  const double split = points_(order_[mid], axis);
  const std::uint32_t left = build(begin, mid, depth + 1);
  const std::uint32_t right = build(mid, end, depth + 1);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search(std::uint32_t id, const Vec3& query, Neighbor& best) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t k = node.begin; k < node.end; ++k) {
      const Eigen::Index idx = order_[k];
      const double d = (points_.row(idx).transpose() - query).squaredNorm();
      if (d < best.squared_distance || (d == best.squared_distance && idx < best.index)) {
        best = {idx, d};
      }
    }
    return;
  }
  // Left subtree holds coordinates <= split, right holds >= split.
  const double delta = query[node.axis] - node.split;
  const std::uint32_t near = delta < 0.0 ? node.left : node.right;
  const std::uint32_t far = delta < 0.0 ? node.right : node.left;
  search(near, query, best);
  if (delta * delta <= best.squared_distance) search(far, query, best);
}

KdTree::Neighbor KdTree::nearest(const Vec3& query) const {
  Neighbor best{-1, std::numeric_limits<double>::infinity()};
  search(0, query, best);
  return best;
}

// TriangleBvh ----------------------------------------------------------------

namespace {
constexpr std::uint32_t bvh_leaf_size = 4;
}

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) : mesh_(mesh) {
  if (mesh_.empty()) throw std::invalid_argument("BVH needs a non-empty mesh");
  validate_mesh(mesh_);
  faces_.resize(static_cast<std::size_t>(mesh_.num_faces()));
  std::iota(faces_.begin(), faces_.end(), 0);
  centroids_.resize(faces_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto [a, b, c] = mesh_.triangle(static_cast<Eigen::Index>(f));
    centroids_[f] = (a + b + c) / 3.0;
  }
  nodes_.reserve(2 * faces_.size() / bvh_leaf_size + 1);
  build(0, static_cast<std::uint32_t>(faces_.size()));
}

std::uint32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroid_box;
  for (std::uint32_t k = begin; k < end; ++k) {
    const auto [a, b, c] = mesh_.triangle(faces_[k]);
    box.extend(a).extend(b).extend(c);
    centroid_box.extend(centroids_[static_cast<std::size_t>(faces_[k])]);
  }
  nodes_[id].box = box;
  if (end - begin <= bvh_leaf_size) {
    nodes_[id].begin = begin;
    nodes_[id].count = end - begin;
    return id;
  }
  int axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(faces_.begin() + begin, faces_.begin() + mid, faces_.begin() + end,
                   [&](int l, int r) {
                     return centroids_[static_cast<std::size_t>(l)][axis] <
                            centroids_[static_cast<std::size_t>(r)][axis];
                   });
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

TriangleBvh::Closest TriangleBvh::closest(const Vec3& query) const {
  double best_sq = std::numeric_limits<double>::infinity();
  Closest best;
  std::vector<std::uint32_t> stack = {0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.squaredExteriorDistance(query) > best_sq) continue;
    if (node.count > 0) {
      for (std::uint32_t k = node.begin; k < node.begin + node.count; ++k) {
        const int f = faces_[k];
        const auto [a, b, c] = mesh_.triangle(f);
        const Vec3 q = closest_point_on_triangle(query, a, b, c);
        const double d = (q - query).squaredNorm();
        if (d < best_sq || (d == best_sq && f < best.face)) {
          best_sq = d;
          best.face = f;
          best.point = q;
        }
      }
      continue;
    }
    // Visit the nearer child first.
    const double dl = nodes_[node.left].box.squaredExteriorDistance(query);
    const double dr = nodes_[node.right].box.squaredExteriorDistance(query);
    if (dl < dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

}  // namespace fof
