#include "pixht/core.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "pixht/error.hpp"

namespace pixht {

CameraIntrinsics CameraIntrinsics::centered(double fov_deg, int width, int height) {
  CameraIntrinsics intr;
  intr.fov_deg = fov_deg;
  intr.width = width;
  intr.height = height;
  intr.principal_point = Vec2(width / 2.0, height / 2.0);
  return intr;
}

double CameraIntrinsics::focal() const { return focal_from_fov(fov_deg, height); }

void CameraIntrinsics::validate() const {
  if (!(fov_deg > 0.0 && fov_deg < 180.0))
    throw DomainError("fov_deg must lie in (0, 180), got " + std::to_string(fov_deg));
  if (width < 1 || height < 1)
    throw DomainError("image dimensions must be >= 1");
  if (!principal_point.allFinite())
    throw DomainError("principal point must be finite");
}

void CameraPose::validate() const {
  if (!(pitch_deg >= -90.0 && pitch_deg <= 90.0))
    throw DomainError("pitch_deg must lie in [-90, 90], got " + std::to_string(pitch_deg));
  if (!(roll_deg > -180.0 && roll_deg <= 180.0))
    throw DomainError("roll_deg must lie in (-180, 180], got " + std::to_string(roll_deg));
}

double focal_from_fov(double fov_deg, double image_height) {
  if (!(fov_deg > 0.0 && fov_deg < 180.0))
    throw DomainError("fov_deg must lie in (0, 180), got " + std::to_string(fov_deg));
  if (!(image_height >= 1.0))
    throw DomainError("image height must be >= 1");
  return image_height / (2.0 * std::tan(deg2rad(fov_deg) / 2.0));
}

Mat3 intrinsic_matrix(const CameraIntrinsics& intr) {
  intr.validate();
  const double f = intr.focal();
  Mat3 K;
  K << f, 0.0, intr.principal_point.x(),
       0.0, f, intr.principal_point.y(),
       0.0, 0.0, 1.0;
  return K;
}

Mat3 rotation_from_pose(const CameraPose& pose) {
  pose.validate();
  // Level camera: x = world X, y (down) = -world Z, z (forward) = world Y.
  Mat3 base;
  base << 1, 0, 0,
          0, 0, -1,
          0, 1, 0;
  const double p = deg2rad(pose.pitch_deg);
  const double r = deg2rad(pose.roll_deg);
  Mat3 pitch;
  pitch << 1, 0, 0,
           0, std::cos(p), std::sin(p),
           0, -std::sin(p), std::cos(p);
  Mat3 roll;
  roll << std::cos(r), -std::sin(r), 0,
          std::sin(r), std::cos(r), 0,
          0, 0, 1;
  return roll * pitch * base;
}

Camera::Camera(const CameraIntrinsics& intr, const CameraPose& pose)
    : Camera(intr, pose, rotation_from_pose(pose)) {}

Camera::Camera(const CameraIntrinsics& intr, const CameraPose& pose, const Mat3& R)
    : intr_(intr), pose_(pose), focal_(0.0), R_(R) {
  K_ = intrinsic_matrix(intr_);
  focal_ = K_(0, 0);
  K_inv_ << 1.0 / focal_, 0.0, -intr_.principal_point.x() / focal_,
            0.0, 1.0 / focal_, -intr_.principal_point.y() / focal_,
            0.0, 0.0, 1.0;
}

Camera Camera::with_rotation(const CameraIntrinsics& intr, const Mat3& world_to_camera) {
  const Mat3 should_be_identity = world_to_camera.transpose() * world_to_camera;
  if (!should_be_identity.isIdentity(1e-9) || world_to_camera.determinant() < 0.0)
    throw DomainError("camera rotation must be orthonormal with det +1");
  return Camera(intr, CameraPose{}, world_to_camera);
}

Vec3 Camera::ray(Pixel p) const {
  const Vec3 cam((p.x - intr_.principal_point.x()) / focal_,
                 (p.y - intr_.principal_point.y()) / focal_, 1.0);
  return R_.transpose() * cam;
}

std::optional<Pixel> Camera::project(const Vec3& world) const {
  const Vec3 c = R_ * world;
  if (!(c.z() > 0.0)) return std::nullopt;
  return Pixel{focal_ * c.x() / c.z() + intr_.principal_point.x(),
               focal_ * c.y() / c.z() + intr_.principal_point.y()};
}

Vec3 pixel_ray_world(Pixel p, const CameraIntrinsics& intr, const CameraPose& pose) {
  return Camera(intr, pose).unit_ray(p);
}

}  // namespace pixht
