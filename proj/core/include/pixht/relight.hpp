#pragma once

// Shadows and planar reflections of a reconstructed cloud on its ground plane.

#include <optional>

#include "pixht/core.hpp"
#include "pixht/grid.hpp"

namespace pixht {

struct LightSpec {
  enum class Kind { directional, point };

  Kind kind = Kind::directional;
  Vec3 direction{0.0, 0.0, -1.0};  // directional: travel direction, unit, negative z
  Vec3 position{0.0, 0.0, 1.0};    // point: world position above the ground
  double softness = 0.0;           // Gaussian blur sigma in pixels

  static LightSpec directional(const Vec3& dir, double softness = 0.0);
  static LightSpec point(const Vec3& pos, double softness = 0.0);

  // Throws DomainError for an upward directional light, a point light not
  // above the ground, or negative softness.
  void validate(const GroundPlane& ground) const;
};

// Where the light ray through P meets the ground. Empty for a point light at
// or below P.
std::optional<Vec3> shadow_point(const Vec3& P, const GroundPlane& ground, const LightSpec& light);

struct ShadowResult {
  ScalarGrid mask;     // one channel in [0, 1]
  size_t skipped = 0;  // points above a point light, or projecting behind the camera
};

// Splats every point's ground shadow into the image with a bilinear kernel,
// blurs by light.softness and clips to [0, 1].
ShadowResult cast_shadow(const PointCloud& cloud, const GroundPlane& ground,
                         const LightSpec& light, const Camera& camera);

// Mirror image across the ground plane; an involution.
Vec3 mirror_point(const Vec3& P, const GroundPlane& ground);

struct ReflectionOptions {
  double base_alpha = 0.6;
  double falloff = 0.5;  // lambda, world units

  double alpha(double height_above_ground) const;
};

// Four channels: r, g, b in [0, 1] and alpha. Each mirrored point is
// z-buffered by camera depth; the nearest wins, ties go to the lower index.
ScalarGrid render_reflection(const PointCloud& cloud, const GroundPlane& ground,
                             const Camera& camera, const ReflectionOptions& options = {});

// Separable Gaussian blur of every channel (sigma in pixels, 3-sigma support).
ScalarGrid gaussian_blur(const ScalarGrid& grid, double sigma);

// rgb * (1 - strength * shadow).
ScalarGrid composite_shadow(const ScalarGrid& rgb, const ScalarGrid& shadow, double strength = 0.6);
// Alpha-over of an rgba layer onto rgb.
ScalarGrid composite_layer(const ScalarGrid& rgb, const ScalarGrid& layer);

}  // namespace pixht
