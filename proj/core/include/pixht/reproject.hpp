#pragma once

// Pixel height + perspective field -> scale-invariant point cloud.
//
// Each object pixel p is paired with its foot pixel p~ (the image of the
// vertical drop to the ground). Unprojecting p~ and fixing the ground at
// z = -1 pins the foot point (X_n, Y_n, -1); the object point is the point on
// the ray through p that shares the foot's XY coordinates.

#include <optional>

#include "pixht/camera_est.hpp"
#include "pixht/core.hpp"
#include "pixht/exec.hpp"
#include "pixht/fields.hpp"
#include "pixht/grid.hpp"

namespace pixht {

// p - height * up: the displacement down the image along the local vertical.
Pixel foot_pixel(Pixel p, double height, const Vec2& up);

struct UnprojectionPair {
  Vec3 object_dir;  // R^-1 K^-1 (p, 1)
  Vec3 ground_dir;  // R^-1 K^-1 (p~, 1)
  Vec2 ground_normalized;  // (X_n, Y_n): ground ray scaled to z = -1
  double depth_scale = 0.0;  // d, the object point is d * object_dir
};

struct ReconstructOptions {
  double eps_z = 1e-4;    // minimum |Z~| of the ground ray
  double eps_xy = 1e-12;  // minimum X^2 + Y^2 of the object ray
  double max_invalid_fraction = 0.5;
};

// Empty when the foot pixel is at or above the horizon, or the object ray is
// vertical.
std::optional<UnprojectionPair> unproject_pair(Pixel p, Pixel foot, const Camera& camera,
                                               const ReconstructOptions& options = {});

// d * (X, Y, Z) with d = (X X_n + Y Y_n) / (X^2 + Y^2).
std::optional<Vec3> reconstruct_point(Pixel p, Pixel foot, const Camera& camera,
                                      const ReconstructOptions& options = {});

struct Reconstruction {
  PointCloud front;
  PointCloud back;
  PointCloud feet;  // vertical drop of each front point onto z = -1
  size_t masked = 0;
  size_t invalid_front = 0;
  size_t invalid_back = 0;
  CameraIntrinsics intrinsics;
  CameraPose pose;
};

// Reconstruction with a known camera. Up vectors come from the field at p;
// heights are denormalized with the image height when needed. Pixels follow
// raster order in every cloud. Throws NumericError (code
// "reconstruction-failed") when more than max_invalid_fraction of the masked
// pixels fail.
Reconstruction reconstruct_cloud(const PixelHeightMap& heights, const PerspectiveField& field,
                                 const Camera& camera, const ReconstructOptions& options = {},
                                 const Exec& exec = {});

// Recovers the camera from the field first (grid search over the masked pixels).
Reconstruction reconstruct_cloud(const PixelHeightMap& heights, const PerspectiveField& field,
                                 const GridSpec& grid, const ReconstructOptions& options = {},
                                 const Exec& exec = {});

// Camera-frame forward depth of each reconstructed point, written at its
// source pixel. Pixels without a point are invalid (NaN).
ScalarGrid depth_from_reconstruction(const PointCloud& front, const Camera& camera);

}  // namespace pixht
