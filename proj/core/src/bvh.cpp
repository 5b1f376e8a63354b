#include "pixht/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pixht/error.hpp"
#include "pixht/raytracer.hpp"

namespace pixht {

namespace {
constexpr int kLeafSize = 4;
constexpr double kHitEpsilon = 1e-9;
}  // namespace

bool Aabb::hit(const Vec3& origin, const Vec3& inv_dir, double t_max) const {
  double t0 = 0.0, t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    double tn = (lo[a] - origin[a]) * inv_dir[a];
    double tf = (hi[a] - origin[a]) * inv_dir[a];
    if (std::isnan(tn) || std::isnan(tf)) {
      // Ray parallel to the slab with the origin on its boundary.
      if (origin[a] < lo[a] || origin[a] > hi[a]) return false;
      continue;
    }
    if (tn > tf) std::swap(tn, tf);
    t0 = std::max(t0, tn);
    t1 = std::min(t1, tf);
    if (t0 > t1) return false;
  }
  return true;
}

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& e1, const Vec3& e2) {
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-14) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv;
  if (t <= kHitEpsilon) return std::nullopt;
  return t;
}

MeshBvh::MeshBvh(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& faces) {
  if (faces.empty()) throw SceneError("triangle mesh has no faces");
  const int n = static_cast<int>(faces.size());
  a_.resize(faces.size());
  e1_.resize(faces.size());
  e2_.resize(faces.size());
  std::vector<Vec3> centroids(faces.size());
  for (int i = 0; i < n; ++i) {
    for (int k : faces[static_cast<size_t>(i)])
      if (k < 0 || k >= static_cast<int>(vertices.size()))
        throw SceneError("triangle mesh face references a missing vertex");
    const auto& f = faces[static_cast<size_t>(i)];
    const Vec3& a = vertices[static_cast<size_t>(f[0])];
    const Vec3& b = vertices[static_cast<size_t>(f[1])];
    const Vec3& c = vertices[static_cast<size_t>(f[2])];
    a_[static_cast<size_t>(i)] = a;
    e1_[static_cast<size_t>(i)] = b - a;
    e2_[static_cast<size_t>(i)] = c - a;
    centroids[static_cast<size_t>(i)] = (a + b + c) / 3.0;
  }
  order_.resize(faces.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * faces.size() / kLeafSize + 1);
  build(0, n, centroids);
}

int MeshBvh::build(int begin, int end, std::vector<Vec3>& centroids) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box, cbox;
  for (int i = begin; i < end; ++i) {
    const auto f = static_cast<size_t>(order_[static_cast<size_t>(i)]);
    box.extend(a_[f]);
    box.extend(Vec3(a_[f] + e1_[f]));
    box.extend(Vec3(a_[f] + e2_[f]));
    cbox.extend(centroids[f]);
  }
  nodes_[static_cast<size_t>(index)].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[static_cast<size_t>(index)].begin = begin;
    nodes_[static_cast<size_t>(index)].end = end;
    return index;
  }
  int axis = 0;
  const Vec3 extent = cbox.hi - cbox.lo;
  if (extent.y() > extent[axis]) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int l, int r) {
                     const double cl = centroids[static_cast<size_t>(l)][axis];
                     const double cr = centroids[static_cast<size_t>(r)][axis];
                     return cl < cr || (cl == cr && l < r);
                   });
  const int left = build(begin, mid, centroids);
  const int right = build(mid, end, centroids);
  nodes_[static_cast<size_t>(index)].left = left;
  nodes_[static_cast<size_t>(index)].right = right;
  return index;
}

std::optional<MeshBvh::Extremes> MeshBvh::first_last(const Ray& ray) const {
  const Vec3 inv(1.0 / ray.direction.x(), 1.0 / ray.direction.y(), 1.0 / ray.direction.z());
  Extremes ex{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
              -1, -1};
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<size_t>(stack[--top])];
    if (!node.box.hit(ray.origin, inv, std::numeric_limits<double>::infinity())) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int f = order_[static_cast<size_t>(i)];
        const auto fs = static_cast<size_t>(f);
        if (auto t = intersect_triangle(ray.origin, ray.direction, a_[fs], e1_[fs], e2_[fs])) {
          if (*t < ex.t_min || (*t == ex.t_min && f < ex.face_min)) {
            ex.t_min = *t;
            ex.face_min = f;
          }
          if (*t > ex.t_max || (*t == ex.t_max && f < ex.face_max)) {
            ex.t_max = *t;
            ex.face_max = f;
          }
        }
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  if (ex.face_min < 0) return std::nullopt;
  return ex;
}

}  // namespace pixht
