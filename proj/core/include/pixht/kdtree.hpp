#pragma once

#include <vector>

#include "pixht/grid.hpp"

namespace pixht {

// Static 3-d tree for exact nearest-neighbour queries.
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& points);

  struct Match {
    size_t index;
    double distance_sq;
  };

  // Exact nearest point; ties resolve to the smallest index.
  Match nearest(const Vec3& q) const;
  size_t size() const { return points_.size(); }

 private:
  struct Node {
    int axis = -1;  // -1 for a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };

  int build(int begin, int end, int depth);
  void search(int node, const Vec3& q, Match& best) const;

  std::vector<Vec3> points_;
  std::vector<size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace pixht
