#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pixht/grid.hpp"

namespace pixht {

struct Ray;

struct Aabb {
  Vec3 lo{1e300, 1e300, 1e300};
  Vec3 hi{-1e300, -1e300, -1e300};

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  // Slab test against the ray segment [0, t_max].
  bool hit(const Vec3& origin, const Vec3& inv_dir, double t_max) const;
};

// Binary BVH over mesh triangles, median split on the widest centroid axis.
class MeshBvh {
 public:
  struct Extremes {
    double t_min;
    double t_max;
    int face_min;
    int face_max;
  };

  MeshBvh(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& faces);

  // Smallest and largest positive hit over every triangle the ray crosses.
  std::optional<Extremes> first_last(const Ray& ray) const;

  const Aabb& bounds() const { return nodes_.front().box; }
  Vec3 face_normal(int face) const {
    const auto f = static_cast<size_t>(face);
    return e1_[f].cross(e2_[f]).normalized();
  }
  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Aabb box;
    int left = -1;   // child index, or -1 for a leaf
    int right = -1;
    int begin = 0;   // leaf triangle range in order_
    int end = 0;
  };

  int build(int begin, int end, std::vector<Vec3>& centroids);

  std::vector<Vec3> a_, e1_, e2_;  // per-face origin and edges
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

// Moller-Trumbore; returns t for any crossing regardless of facing.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& e1, const Vec3& e2);

}  // namespace pixht
