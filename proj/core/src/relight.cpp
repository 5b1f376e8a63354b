#include "pixht/relight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pixht/error.hpp"

namespace pixht {

LightSpec LightSpec::directional(const Vec3& dir, double softness) {
  LightSpec l;
  l.kind = Kind::directional;
  l.direction = dir.normalized();
  l.softness = softness;
  return l;
}

LightSpec LightSpec::point(const Vec3& pos, double softness) {
  LightSpec l;
  l.kind = Kind::point;
  l.position = pos;
  l.softness = softness;
  return l;
}

void LightSpec::validate(const GroundPlane& ground) const {
  if (!(softness >= 0.0)) throw DomainError("light softness must be >= 0");
  if (kind == Kind::directional) {
    if (!(direction.norm() > 0.0) || !(direction.z() < 0.0))
      throw DomainError("directional light must point downwards (negative z)");
  } else if (!(position.z() > ground.z_const)) {
    throw DomainError("point light must lie strictly above the ground");
  }
}

std::optional<Vec3> shadow_point(const Vec3& P, const GroundPlane& ground, const LightSpec& light) {
  const double zg = ground.z_const;
  if (light.kind == LightSpec::Kind::directional) {
    const Vec3& l = light.direction;
    return Vec3(P - ((P.z() - zg) / l.z()) * l);
  }
  const Vec3& Q = light.position;
  if (P.z() >= Q.z()) return std::nullopt;
  return Vec3(Q + (P - Q) * ((zg - Q.z()) / (P.z() - Q.z())));
}

namespace {

// Bilinear splat at a continuous pixel position (centers at i + 0.5).
void splat(ScalarGrid& acc, Pixel p, float weight) {
  const double u = p.x - 0.5, v = p.y - 0.5;
  const double fx = std::floor(u), fy = std::floor(v);
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const double ax = u - fx, ay = v - fy;
  const double w[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
  const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
  const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
  for (int k = 0; k < 4; ++k) {
    if (xs[k] < 0 || ys[k] < 0 || xs[k] >= acc.width() || ys[k] >= acc.height()) continue;
    if (w[k] == 0.0) continue;
    acc.at(xs[k], ys[k]) += static_cast<float>(w[k] * weight);
  }
}

}  // namespace

ShadowResult cast_shadow(const PointCloud& cloud, const GroundPlane& ground,
                         const LightSpec& light, const Camera& camera) {
  if (cloud.empty()) throw DomainError("cannot cast the shadow of an empty cloud");
  light.validate(ground);
  ShadowResult out;
  out.mask = ScalarGrid(camera.width(), camera.height(), {"shadow"});
  for (const auto& P : cloud.points) {
    const auto S = shadow_point(P, ground, light);
    if (!S) {
      ++out.skipped;
      continue;
    }
    const auto px = camera.project(*S);
    if (!px) {
      ++out.skipped;
      continue;
    }
    splat(out.mask, *px, 1.0f);
  }
  if (light.softness > 0.0) out.mask = gaussian_blur(out.mask, light.softness);
  for (auto& v : out.mask.values()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

Vec3 mirror_point(const Vec3& P, const GroundPlane& ground) {
  return {P.x(), P.y(), 2.0 * ground.z_const - P.z()};
}

double ReflectionOptions::alpha(double height_above_ground) const {
  return base_alpha * std::exp(-std::max(0.0, height_above_ground) / falloff);
}

ScalarGrid render_reflection(const PointCloud& cloud, const GroundPlane& ground,
                             const Camera& camera, const ReflectionOptions& options) {
  if (!cloud.has_colors()) throw DomainError("reflection needs a colored point cloud");
  if (!(options.falloff > 0.0)) throw DomainError("reflection falloff must be > 0");
  const int W = camera.width(), H = camera.height();
  ScalarGrid layer(W, H, {"r", "g", "b", "alpha"});
  std::vector<double> zbuf(static_cast<size_t>(W) * H, std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 M = mirror_point(cloud.points[i], ground);
    const double depth = camera.to_camera(M).z();
    const auto px = camera.project(M);
    if (!px) continue;
    const int x = static_cast<int>(std::floor(px->x));
    const int y = static_cast<int>(std::floor(px->y));
    if (x < 0 || y < 0 || x >= W || y >= H) continue;
    auto& z = zbuf[static_cast<size_t>(y) * W + x];
    // Strict comparison keeps the lowest index among equal depths.
    if (!(depth < z)) continue;
    z = depth;
    const auto& c = cloud.colors[i];
    for (int k = 0; k < 3; ++k) layer.at(k, x, y) = c[static_cast<size_t>(k)] / 255.0f;
    layer.at(3, x, y) = static_cast<float>(options.alpha(cloud.points[i].z() - ground.z_const));
  }
  return layer;
}

ScalarGrid gaussian_blur(const ScalarGrid& grid, double sigma) {
  if (!(sigma > 0.0)) return grid;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[static_cast<size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[static_cast<size_t>(i + radius)];
  }
  for (auto& k : kernel) k /= sum;
  const int W = grid.width(), H = grid.height();
  ScalarGrid tmp = grid, out = grid;
  for (int c = 0; c < grid.channel_count(); ++c) {
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int xx = std::clamp(x + i, 0, W - 1);
          acc += kernel[static_cast<size_t>(i + radius)] * grid.at(c, xx, y);
        }
        tmp.at(c, x, y) = static_cast<float>(acc);
      }
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int yy = std::clamp(y + i, 0, H - 1);
          acc += kernel[static_cast<size_t>(i + radius)] * tmp.at(c, x, yy);
        }
        out.at(c, x, y) = static_cast<float>(acc);
      }
  }
  return out;
}

ScalarGrid composite_shadow(const ScalarGrid& rgb, const ScalarGrid& shadow, double strength) {
  if (rgb.width() != shadow.width() || rgb.height() != shadow.height())
    throw DomainError("image and shadow dimensions differ");
  ScalarGrid out = rgb;
  for (int c = 0; c < rgb.channel_count(); ++c)
    for (int y = 0; y < rgb.height(); ++y)
      for (int x = 0; x < rgb.width(); ++x)
        out.at(c, x, y) = static_cast<float>(rgb.at(c, x, y) * (1.0 - strength * shadow.at(x, y)));
  return out;
}

ScalarGrid composite_layer(const ScalarGrid& rgb, const ScalarGrid& layer) {
  if (rgb.width() != layer.width() || rgb.height() != layer.height())
    throw DomainError("image and layer dimensions differ");
  if (layer.channel_count() != 4) throw DomainError("layer must have rgb + alpha channels");
  ScalarGrid out = rgb;
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x) {
      const float a = layer.at(3, x, y);
      for (int c = 0; c < std::min(3, rgb.channel_count()); ++c)
        out.at(c, x, y) = (1.0f - a) * rgb.at(c, x, y) + a * layer.at(c, x, y);
    }
  return out;
}

}  // namespace pixht
