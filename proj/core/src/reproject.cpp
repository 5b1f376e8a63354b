#include "pixht/reproject.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pixht/error.hpp"

namespace pixht {

Pixel foot_pixel(Pixel p, double height, const Vec2& up) {
  return {p.x - height * up.x(), p.y - height * up.y()};
}

std::optional<UnprojectionPair> unproject_pair(Pixel p, Pixel foot, const Camera& camera,
                                               const ReconstructOptions& options) {
  UnprojectionPair u;
  u.object_dir = camera.ray(p);
  u.ground_dir = camera.ray(foot);
  // The ground lies below the camera, so a usable foot ray points downwards.
  if (!(u.ground_dir.z() < -options.eps_z)) return std::nullopt;
  const double X = u.object_dir.x(), Y = u.object_dir.y();
  const double xy2 = X * X + Y * Y;
  if (!(xy2 > options.eps_xy)) return std::nullopt;
  const double s = -1.0 / u.ground_dir.z();
  u.ground_normalized = Vec2(u.ground_dir.x() * s, u.ground_dir.y() * s);
  u.depth_scale = (X * u.ground_normalized.x() + Y * u.ground_normalized.y()) / xy2;
  if (!(u.depth_scale > 0.0) || !std::isfinite(u.depth_scale)) return std::nullopt;
  return u;
}

std::optional<Vec3> reconstruct_point(Pixel p, Pixel foot, const Camera& camera,
                                      const ReconstructOptions& options) {
  const auto u = unproject_pair(p, foot, camera, options);
  if (!u) return std::nullopt;
  return u->depth_scale * u->object_dir;
}

namespace {

struct PixelResult {
  Vec3 front, back, foot;
  bool front_ok = false;
  bool back_ok = false;
};

}  // namespace

Reconstruction reconstruct_cloud(const PixelHeightMap& heights, const PerspectiveField& field,
                                 const Camera& camera, const ReconstructOptions& options,
                                 const Exec& exec) {
  const int W = camera.width(), H = camera.height();
  if (heights.width() != W || heights.height() != H || field.width() != W || field.height() != H)
    throw DomainError("height map, perspective field and camera dimensions differ");
  const double scale = heights.normalized ? static_cast<double>(H) : 1.0;

  const size_t npix = static_cast<size_t>(W) * static_cast<size_t>(H);
  std::vector<PixelResult> results(npix);
  std::vector<std::uint8_t> masked(npix, 0);

  parallel_for(exec, 0, H, [&](long row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < W; ++x) {
      if (!heights.in_mask(x, y)) continue;
      const size_t idx = static_cast<size_t>(y) * W + x;
      masked[idx] = 1;
      if (!field.up.valid(x, y) || !heights.front.valid(x, y)) continue;
      const double hf = heights.front.at(x, y) * scale;
      if (!std::isfinite(hf) || hf < 0.0) continue;
      Vec2 up;
      try {
        up = field.up_vector(x, y);
      } catch (const DomainError&) {
        continue;
      }
      const Pixel p = Pixel::center_of(x, y);
      auto& r = results[idx];
      const auto front = unproject_pair(p, foot_pixel(p, hf, up), camera, options);
      if (!front) continue;
      r.front = front->depth_scale * front->object_dir;
      r.foot = Vec3(r.front.x(), r.front.y(), -1.0);
      r.front_ok = true;
      if (!heights.back.valid(x, y)) continue;
      const double hb = heights.back.at(x, y) * scale;
      if (!std::isfinite(hb) || hb < 0.0) continue;
      if (const auto back = reconstruct_point(p, foot_pixel(p, hb, up), camera, options)) {
        r.back = *back;
        r.back_ok = true;
      }
    }
  });

  Reconstruction rec;
  rec.intrinsics = camera.intrinsics();
  rec.pose = camera.pose();
  for (size_t idx = 0; idx < npix; ++idx) {
    if (!masked[idx]) continue;
    ++rec.masked;
    const auto& r = results[idx];
    const auto pix = static_cast<std::int64_t>(idx);
    if (!r.front_ok) {
      ++rec.invalid_front;
      continue;
    }
    rec.front.add(r.front, pix);
    rec.feet.add(r.foot, pix);
    if (r.back_ok) {
      rec.back.add(r.back, pix);
    } else {
      ++rec.invalid_back;
    }
  }
  if (rec.masked > 0 &&
      static_cast<double>(rec.invalid_front) >
          options.max_invalid_fraction * static_cast<double>(rec.masked))
    throw NumericError("reconstruction-failed",
                       "reconstruction failed: " + std::to_string(rec.invalid_front) + " of " +
                           std::to_string(rec.masked) + " masked pixels invalid");
  return rec;
}

Reconstruction reconstruct_cloud(const PixelHeightMap& heights, const PerspectiveField& field,
                                 const GridSpec& grid, const ReconstructOptions& options,
                                 const Exec& exec) {
  const auto est = estimate_camera(field, heights.mask, grid, exec);
  const Camera camera(est.intrinsics(field.width(), field.height()), est.pose());
  return reconstruct_cloud(heights, field, camera, options, exec);
}

ScalarGrid depth_from_reconstruction(const PointCloud& front, const Camera& camera) {
  if (!front.has_pixels()) throw DomainError("depth conversion needs points with source pixels");
  const int W = camera.width(), H = camera.height();
  front.validate(W, H);
  ScalarGrid depth(W, H, {"depth"}, std::numeric_limits<float>::quiet_NaN());
  depth.ensure_mask();
  std::fill(depth.values().begin(), depth.values().end(), std::numeric_limits<float>::quiet_NaN());
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) depth.set_valid(x, y, false);
  for (size_t i = 0; i < front.size(); ++i) {
    const double z = camera.to_camera(front.points[i]).z();
    if (!(z > 0.0)) continue;
    const int x = static_cast<int>(front.pixel_index[i] % W);
    const int y = static_cast<int>(front.pixel_index[i] / W);
    depth.at(x, y) = static_cast<float>(z);
    depth.set_valid(x, y, true);
  }
  return depth;
}

}  // namespace pixht
