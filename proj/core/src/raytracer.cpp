#include "pixht/raytracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pixht/bvh.hpp"
#include "pixht/error.hpp"

namespace pixht {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;
constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Interval [t0, t1] of the ray inside a convex shape (may extend behind the origin).
struct Interval {
  double t0;
  double t1;
};

Mat3 yaw_matrix(double yaw_deg) {
  const double a = deg2rad(yaw_deg);
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0,
       std::sin(a), std::cos(a), 0,
       0, 0, 1;
  return m;
}

std::optional<Interval> sphere_interval(const Ray& ray, const Sphere& s) {
  const Vec3 oc = ray.origin - s.center;
  const double b = oc.dot(ray.direction);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double h = b * b - c;
  if (h < 0.0) return std::nullopt;
  const double r = std::sqrt(h);
  return Interval{-b - r, -b + r};
}

std::optional<Interval> box_interval(const Ray& ray, const Box& box) {
  const Mat3 to_local = yaw_matrix(box.yaw_deg).transpose();
  const Vec3 q = to_local * (ray.origin - box.center);
  const Vec3 d = to_local * ray.direction;
  double t0 = -kInf, t1 = kInf;
  for (int a = 0; a < 3; ++a) {
    const double he = box.half_extents[a];
    if (std::abs(d[a]) < 1e-15) {
      if (std::abs(q[a]) > he) return std::nullopt;
      continue;
    }
    double tn = (-he - q[a]) / d[a];
    double tf = (he - q[a]) / d[a];
    if (tn > tf) std::swap(tn, tf);
    t0 = std::max(t0, tn);
    t1 = std::min(t1, tf);
    if (t0 > t1) return std::nullopt;
  }
  return Interval{t0, t1};
}

std::optional<Interval> cylinder_interval(const Ray& ray, const Cylinder& cyl) {
  const double qx = ray.origin.x() - cyl.base_center.x();
  const double qy = ray.origin.y() - cyl.base_center.y();
  const double dx = ray.direction.x(), dy = ray.direction.y(), dz = ray.direction.z();
  double s0 = -kInf, s1 = kInf;
  const double a = dx * dx + dy * dy;
  if (a < 1e-15) {
    if (qx * qx + qy * qy > cyl.radius * cyl.radius) return std::nullopt;
  } else {
    const double b = qx * dx + qy * dy;
    const double c = qx * qx + qy * qy - cyl.radius * cyl.radius;
    const double h = b * b - a * c;
    if (h < 0.0) return std::nullopt;
    const double r = std::sqrt(h);
    s0 = (-b - r) / a;
    s1 = (-b + r) / a;
  }
  const double z0 = cyl.base_center.z(), z1 = cyl.base_center.z() + cyl.height;
  double c0 = -kInf, c1 = kInf;
  if (std::abs(dz) < 1e-15) {
    if (ray.origin.z() < z0 || ray.origin.z() > z1) return std::nullopt;
  } else {
    c0 = (z0 - ray.origin.z()) / dz;
    c1 = (z1 - ray.origin.z()) / dz;
    if (c0 > c1) std::swap(c0, c1);
  }
  const double t0 = std::max(s0, c0), t1 = std::min(s1, c1);
  if (t0 > t1) return std::nullopt;
  return Interval{t0, t1};
}

Vec3 sphere_normal(const Sphere& s, const Vec3& p) { return (p - s.center).normalized(); }

Vec3 box_normal(const Box& box, const Vec3& p) {
  const Mat3 yaw = yaw_matrix(box.yaw_deg);
  const Vec3 q = yaw.transpose() * (p - box.center);
  int axis = 0;
  double best = -1.0;
  for (int a = 0; a < 3; ++a) {
    const double r = std::abs(q[a]) / box.half_extents[a];
    if (r > best) {
      best = r;
      axis = a;
    }
  }
  Vec3 n = Vec3::Zero();
  n[axis] = q[axis] >= 0.0 ? 1.0 : -1.0;
  return yaw * n;
}

Vec3 cylinder_normal(const Cylinder& cyl, const Vec3& p) {
  const double dz_bottom = std::abs(p.z() - cyl.base_center.z());
  const double dz_top = std::abs(p.z() - (cyl.base_center.z() + cyl.height));
  const Vec2 radial(p.x() - cyl.base_center.x(), p.y() - cyl.base_center.y());
  const double dr = std::abs(radial.norm() - cyl.radius);
  if (dz_top < dr && dz_top <= dz_bottom) return Vec3(0, 0, 1);
  if (dz_bottom < dr) return Vec3(0, 0, -1);
  return Vec3(radial.x(), radial.y(), 0.0).normalized();
}

std::optional<SurfaceCrossings> convex_crossings(const Ray& ray, std::optional<Interval> iv,
                                                 auto&& normal_at) {
  if (!iv || iv->t1 <= kEps) return std::nullopt;
  SurfaceCrossings c;
  c.t_in = iv->t0 > kEps ? iv->t0 : iv->t1;
  c.t_out = iv->t1;
  c.normal_in = normal_at(Vec3(ray.origin + c.t_in * ray.direction));
  return c;
}

std::pair<Vec3, Vec3> shape_bounds(const Shape& shape) {
  return std::visit(
      Overloaded{
          [](const Sphere& s) {
            const Vec3 r = Vec3::Constant(s.radius);
            return std::pair<Vec3, Vec3>{s.center - r, s.center + r};
          },
          [](const Box& b) {
            const Mat3 yaw = yaw_matrix(b.yaw_deg);
            Aabb box;
            for (int i = 0; i < 8; ++i) {
              const Vec3 corner((i & 1 ? 1 : -1) * b.half_extents.x(),
                                (i & 2 ? 1 : -1) * b.half_extents.y(),
                                (i & 4 ? 1 : -1) * b.half_extents.z());
              box.extend(Vec3(b.center + yaw * corner));
            }
            return std::pair<Vec3, Vec3>{box.lo, box.hi};
          },
          [](const Cylinder& c) {
            const Vec3 lo = c.base_center - Vec3(c.radius, c.radius, 0.0);
            const Vec3 hi = c.base_center + Vec3(c.radius, c.radius, c.height);
            return std::pair<Vec3, Vec3>{lo, hi};
          },
          [](const TriangleMesh& m) {
            return std::pair<Vec3, Vec3>{m.bvh().bounds().lo, m.bvh().bounds().hi};
          }},
      shape);
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  bvh_ = std::make_shared<const MeshBvh>(vertices_, faces_);
}

std::optional<SurfaceCrossings> intersect_shape(const Ray& ray, const Shape& shape) {
  return std::visit(
      Overloaded{
          [&](const Sphere& s) {
            return convex_crossings(ray, sphere_interval(ray, s),
                                    [&](const Vec3& p) { return sphere_normal(s, p); });
          },
          [&](const Box& b) {
            return convex_crossings(ray, box_interval(ray, b),
                                    [&](const Vec3& p) { return box_normal(b, p); });
          },
          [&](const Cylinder& c) {
            return convex_crossings(ray, cylinder_interval(ray, c),
                                    [&](const Vec3& p) { return cylinder_normal(c, p); });
          },
          [&](const TriangleMesh& m) -> std::optional<SurfaceCrossings> {
            const auto ex = m.bvh().first_last(ray);
            if (!ex) return std::nullopt;
            Vec3 n = m.bvh().face_normal(ex->face_min);
            if (n.dot(ray.direction) > 0.0) n = -n;
            return SurfaceCrossings{ex->t_min, ex->t_max, n};
          }},
      shape);
}

std::optional<HitPair> intersect_first_last(const Ray& ray, const Scene& scene) {
  std::optional<HitPair> best;
  for (size_t i = 0; i < scene.primitives.size(); ++i) {
    const auto c = intersect_shape(ray, scene.primitives[i].shape);
    if (!c) continue;
    const int id = static_cast<int>(i);
    if (!best) {
      best = HitPair{};
      best->t_first = c->t_in;
      best->first_normal = c->normal_in;
      best->first_primitive = id;
      best->t_last = c->t_out;
      best->last_primitive = id;
      continue;
    }
    if (c->t_in < best->t_first) {
      best->t_first = c->t_in;
      best->first_normal = c->normal_in;
      best->first_primitive = id;
    }
    if (c->t_out > best->t_last) {
      best->t_last = c->t_out;
      best->last_primitive = id;
    }
  }
  if (best) {
    best->first_point = ray.origin + best->t_first * ray.direction;
    best->last_point = ray.origin + best->t_last * ray.direction;
  }
  return best;
}

std::pair<Vec3, Vec3> Scene::bounds() const {
  Aabb box;
  for (const auto& p : primitives) {
    const auto [lo, hi] = shape_bounds(p.shape);
    box.extend(lo);
    box.extend(hi);
  }
  return {box.lo, box.hi};
}

void Scene::validate() const {
  if (primitives.empty()) throw SceneError("scene has no primitives");
  for (size_t i = 0; i < primitives.size(); ++i) {
    const auto& shape = primitives[i].shape;
    std::visit(Overloaded{[](const Sphere& s) {
                            if (!(s.radius > 0.0)) throw SceneError("sphere radius must be > 0");
                          },
                          [](const Box& b) {
                            if (!(b.half_extents.minCoeff() > 0.0))
                              throw SceneError("box half extents must be > 0");
                          },
                          [](const Cylinder& c) {
                            if (!(c.radius > 0.0 && c.height > 0.0))
                              throw SceneError("cylinder radius and height must be > 0");
                          },
                          [](const TriangleMesh&) {}},
               shape);
    const auto [lo, hi] = shape_bounds(shape);
    if (lo.z() < -1e-9)
      throw SceneError("primitive " + std::to_string(i) + " extends below the ground plane");
  }
  if (!(camera.position.z() > 0.0)) throw SceneError("camera must be strictly above the ground");
  camera.intrinsics.validate();
  const auto [lo, hi] = bounds();
  const Vec3 slack = Vec3::Constant(1e-6);
  if ((camera.target.array() < (lo - slack).array()).any() ||
      (camera.target.array() > (hi + slack).array()).any())
    throw SceneError("camera target lies outside the scene bounds");
  for (const auto& light : lights)
    std::visit(Overloaded{[](const DirectionalLight& l) {
                            if (!(l.direction.norm() > 0.0))
                              throw SceneError("directional light needs a direction");
                          },
                          [](const PointLight& l) {
                            if (!(l.position.z() > 0.0))
                              throw SceneError("point light must be above the ground");
                          }},
               light);
}

CameraPose derive_pose_from_lookat(const Vec3& position, const Vec3& target, double roll_deg) {
  const Vec3 d = target - position;
  const double n = d.norm();
  if (!(n > 0.0)) throw SceneError("camera position coincides with its target");
  const Vec3 f = d / n;
  if (std::hypot(f.x(), f.y()) < 1e-9)
    throw SceneError("degenerate pose: vertical look direction");
  CameraPose pose;
  pose.pitch_deg = rad2deg(std::asin(std::clamp(f.z(), -1.0, 1.0)));
  pose.roll_deg = roll_deg;
  try {
    pose.validate();
  } catch (const DomainError& e) {
    throw SceneError(e.what());
  }
  return pose;
}

SceneFrame SceneFrame::from_camera(const SceneCamera& camera) {
  const Vec3 d = camera.target - camera.position;
  const Vec2 h(d.x(), d.y());
  if (!(h.norm() > 0.0)) throw SceneError("degenerate pose: vertical look direction");
  const Vec2 fh = h.normalized();
  SceneFrame frame;
  frame.camera_position = camera.position;
  frame.yaw << fh.y(), fh.x(), 0,
               -fh.x(), fh.y(), 0,
               0, 0, 1;
  frame.camera_height = camera.position.z();
  return frame;
}

namespace {

bool occluded(const Scene& scene, const Vec3& from, const Vec3& dir, double max_t) {
  const auto hit = intersect_first_last(Ray{from, dir}, scene);
  return hit && hit->t_first < max_t;
}

Vec3 shade(const Scene& scene, const Vec3& point, const Vec3& normal, const Vec3& albedo,
           double ambient) {
  const double offset = 1e-7 * (1.0 + point.norm());
  const Vec3 origin = point + offset * normal;
  double irradiance = ambient;
  for (const auto& light : scene.lights) {
    std::visit(Overloaded{[&](const DirectionalLight& l) {
                            const Vec3 to_light = -l.direction.normalized();
                            const double c = normal.dot(to_light);
                            if (c <= 0.0) return;
                            if (occluded(scene, origin, to_light, kInf)) return;
                            irradiance += l.intensity * c;
                          },
                          [&](const PointLight& l) {
                            const Vec3 v = l.position - point;
                            const double dist = v.norm();
                            const Vec3 to_light = v / dist;
                            const double c = normal.dot(to_light);
                            if (c <= 0.0) return;
                            if (occluded(scene, origin, to_light, dist)) return;
                            irradiance += l.intensity * c / (dist * dist);
                          }},
               light);
  }
  return (albedo * irradiance).cwiseMin(1.0).cwiseMax(0.0);
}

}  // namespace

GroundTruth render_ground_truth(const Scene& scene, const RenderOptions& options,
                                const Exec& exec) {
  scene.validate();
  const auto& intr = scene.camera.intrinsics;
  GroundTruth gt;
  gt.intrinsics = intr;
  gt.pose = derive_pose_from_lookat(scene.camera.position, scene.camera.target,
                                    scene.camera.roll_deg);
  gt.frame = SceneFrame::from_camera(scene.camera);
  const Camera cam(intr, gt.pose);
  const int W = intr.width, H = intr.height;

  gt.rgb = ScalarGrid(W, H, {"r", "g", "b"});
  gt.depth = ScalarGrid(W, H, {"depth"}, kNaN);
  gt.depth.ensure_mask();
  gt.mask = ScalarGrid(W, H, {kMaskChannel});
  std::vector<std::string> shadow_names;
  for (size_t i = 0; i < scene.lights.size(); ++i) shadow_names.push_back("shadow_" + std::to_string(i));
  if (shadow_names.empty()) shadow_names.push_back("shadow_none");
  gt.ground_shadow = ScalarGrid(W, H, shadow_names);
  gt.pixel_height = PixelHeightMap::zeros(W, H);
  gt.pixel_height.front.ensure_mask();
  gt.pixel_height.back.ensure_mask();

  const size_t npix = static_cast<size_t>(W) * static_cast<size_t>(H);
  std::vector<Vec3> front(npix), back(npix);
  std::vector<std::uint8_t> hit_flag(npix, 0);

  auto height_of = [&](const Vec3& scene_point) -> std::optional<double> {
    const Vec3 foot(scene_point.x(), scene_point.y(), 0.0);
    const auto pp = cam.project(gt.frame.to_camera_centered(scene_point));
    const auto pf = cam.project(gt.frame.to_camera_centered(foot));
    if (!pp || !pf) return std::nullopt;
    return std::hypot(pp->x - pf->x, pp->y - pf->y);
  };

  parallel_for(exec, 0, H, [&](long row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < W; ++x) {
      const size_t idx = static_cast<size_t>(y) * W + x;
      const Vec3 dir = gt.frame.direction_to_scene(cam.unit_ray(Pixel::center_of(x, y))).normalized();
      const Ray ray{scene.camera.position, dir};
      Vec3 color;
      if (const auto hit = intersect_first_last(ray, scene)) {
        hit_flag[idx] = 1;
        front[idx] = hit->first_point;
        back[idx] = hit->last_point;
        gt.mask.at(x, y) = 1.0f;
        gt.depth.at(x, y) =
            static_cast<float>(cam.to_camera(gt.frame.to_camera_centered(hit->first_point)).z());
        const auto hf = height_of(hit->first_point);
        const auto hb = height_of(hit->last_point);
        if (hf) {
          gt.pixel_height.front.at(x, y) = static_cast<float>(*hf);
        } else {
          gt.pixel_height.front.at(x, y) = kNaN;
          gt.pixel_height.front.set_valid(x, y, false);
        }
        if (hb) {
          gt.pixel_height.back.at(x, y) = static_cast<float>(*hb);
        } else {
          gt.pixel_height.back.at(x, y) = kNaN;
          gt.pixel_height.back.set_valid(x, y, false);
        }
        Vec3 n = hit->first_normal;
        if (n.dot(dir) > 0.0) n = -n;
        const auto& albedo = scene.primitives[static_cast<size_t>(hit->first_primitive)].albedo;
        color = shade(scene, hit->first_point, n, albedo, options.ambient);
      } else {
        gt.depth.set_valid(x, y, false);
        if (dir.z() < 0.0) {
          const double t = -scene.camera.position.z() / dir.z();
          const Vec3 g = scene.camera.position + t * dir;
          color = shade(scene, g, Vec3(0, 0, 1), scene.ground_albedo, options.ambient);
          const Vec3 origin = g + Vec3(0, 0, 1e-7 * (1.0 + g.norm()));
          for (size_t li = 0; li < scene.lights.size(); ++li) {
            const bool blocked = std::visit(
                Overloaded{[&](const DirectionalLight& l) {
                             return occluded(scene, origin, Vec3(-l.direction.normalized()), kInf);
                           },
                           [&](const PointLight& l) {
                             const Vec3 v = l.position - g;
                             return occluded(scene, origin, Vec3(v.normalized()), v.norm());
                           }},
                scene.lights[li]);
            gt.ground_shadow.at(static_cast<int>(li), x, y) = blocked ? 1.0f : 0.0f;
          }
        } else {
          color = options.sky_color;
        }
      }
      for (int c = 0; c < 3; ++c) gt.rgb.at(c, x, y) = static_cast<float>(color[c]);
    }
  });

  for (size_t idx = 0; idx < npix; ++idx) {
    if (!hit_flag[idx]) continue;
    gt.front_surface.add(front[idx], static_cast<std::int64_t>(idx));
    gt.back_surface.add(back[idx], static_cast<std::int64_t>(idx));
  }
  gt.pixel_height.mask = gt.mask;
  gt.perspective = render_perspective_field(cam, exec);
  return gt;
}

}  // namespace pixht
