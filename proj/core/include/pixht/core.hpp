#pragma once

// Camera model and frame conventions.
//
// World frame: right-handed, Z up, camera at the origin. With pitch = roll = 0
// the optical axis is +Y and image-right is +X. Camera frame: x right, y down,
// z forward. The rotation R maps world directions into the camera frame and is
// composed as R = R_roll * R_pitch * R_base. Yaw is not modelled: every
// quantity derived here is invariant to rotations about world Z.
//
// Pixel centers sit at (i + 0.5, j + 0.5); FoV is measured over the image
// height.

#include <optional>

#include <Eigen/Core>

#include "pixht/grid.hpp"

namespace pixht {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Continuous image coordinate in pixels.
struct Pixel {
  double x = 0.0;
  double y = 0.0;

  static Pixel center_of(int col, int row) { return {col + 0.5, row + 0.5}; }
};

struct CameraIntrinsics {
  double fov_deg = 60.0;  // vertical
  int width = 512;
  int height = 512;
  Vec2 principal_point{256.0, 256.0};

  // Intrinsics with the principal point at the image center.
  static CameraIntrinsics centered(double fov_deg, int width, int height);

  double focal() const;
  void validate() const;
};

struct CameraPose {
  double pitch_deg = 0.0;  // optical-axis elevation, positive looks up
  double roll_deg = 0.0;   // counter-clockwise body rotation about the optical axis

  void validate() const;
};

// f = H / (2 tan(fov / 2)). Throws DomainError unless 0 < fov < 180 and H >= 1.
double focal_from_fov(double fov_deg, double image_height);

Mat3 intrinsic_matrix(const CameraIntrinsics& intr);

// World-to-camera rotation for a pose. Orthonormal with det +1.
Mat3 rotation_from_pose(const CameraPose& pose);

// Pinhole camera at the world origin. Immutable after construction.
class Camera {
 public:
  Camera(const CameraIntrinsics& intr, const CameraPose& pose);

  // Camera with an arbitrary world-to-camera rotation (used for yawed frames).
  static Camera with_rotation(const CameraIntrinsics& intr, const Mat3& world_to_camera);

  const CameraIntrinsics& intrinsics() const { return intr_; }
  const CameraPose& pose() const { return pose_; }
  int width() const { return intr_.width; }
  int height() const { return intr_.height; }
  double focal() const { return focal_; }
  const Mat3& K() const { return K_; }
  const Mat3& K_inv() const { return K_inv_; }
  const Mat3& R() const { return R_; }

  // Unnormalized world direction R^T K^-1 (x, y, 1).
  Vec3 ray(Pixel p) const;
  Vec3 unit_ray(Pixel p) const { return ray(p).normalized(); }

  // Camera-frame coordinates of a world point.
  Vec3 to_camera(const Vec3& world) const { return R_ * world; }

  // Image position of a world point; empty when the point is not in front of
  // the camera.
  std::optional<Pixel> project(const Vec3& world) const;

  // World up (+Z) expressed in camera coordinates.
  Vec3 up_in_camera() const { return R_.col(2); }

 private:
  Camera(const CameraIntrinsics& intr, const CameraPose& pose, const Mat3& R);

  CameraIntrinsics intr_;
  CameraPose pose_;
  double focal_;
  Mat3 K_;
  Mat3 K_inv_;
  Mat3 R_;
};

// Unit world direction of the ray through pixel p.
Vec3 pixel_ray_world(Pixel p, const CameraIntrinsics& intr, const CameraPose& pose);

}  // namespace pixht
