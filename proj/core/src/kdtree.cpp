#include "pixht/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "pixht/error.hpp"

namespace pixht {

namespace {
constexpr int kLeafSize = 8;
}

KdTree::KdTree(const std::vector<Vec3>& points) : points_(points) {
  if (points_.empty()) throw DomainError("k-d tree needs at least one point");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), size_t{0});
  nodes_.reserve(2 * points_.size() / kLeafSize + 1);
  build(0, static_cast<int>(points_.size()), 0);
}

int KdTree::build(int begin, int end, int depth) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[static_cast<size_t>(index)].begin = begin;
    nodes_[static_cast<size_t>(index)].end = end;
    return index;
  }
  // Split on the axis of largest spread.
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[static_cast<size_t>(i)]]);
    hi = hi.cwiseMax(points_[order_[static_cast<size_t>(i)]]);
  }
  int axis = 0;
  const Vec3 ext = hi - lo;
  if (ext.y() > ext[axis]) axis = 1;
  if (ext.z() > ext[axis]) axis = 2;
  (void)depth;
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](size_t a, size_t b) {
                     const double va = points_[a][axis], vb = points_[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  const double split = points_[order_[static_cast<size_t>(mid)]][axis];
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  Node& n = nodes_[static_cast<size_t>(index)];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return index;
}

void KdTree::search(int node_index, const Vec3& q, Match& best) const {
  const Node& node = nodes_[static_cast<size_t>(node_index)];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const size_t idx = order_[static_cast<size_t>(i)];
      const double d2 = (points_[idx] - q).squaredNorm();
      if (d2 < best.distance_sq || (d2 == best.distance_sq && idx < best.index))
        best = {idx, d2};
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const int near_child = diff < 0.0 ? node.left : node.right;
  const int far_child = diff < 0.0 ? node.right : node.left;
  search(near_child, q, best);
  if (diff * diff <= best.distance_sq) search(far_child, q, best);
}

KdTree::Match KdTree::nearest(const Vec3& q) const {
  Match best{std::numeric_limits<size_t>::max(), std::numeric_limits<double>::infinity()};
  search(0, q, best);
  return best;
}

}  // namespace pixht
