#pragma once

// Dense per-pixel representations: the perspective field (latitude plus
// image-space up direction) and the front/back pixel-height map.
//
// Up angles use theta = 0 for "straight up the image" and grow clockwise, so
// the image-space up vector is (sin theta, -cos theta) with y pointing down.
// The field stores the (sin theta, cos theta) tuple.

#include <utility>

#include "pixht/core.hpp"
#include "pixht/exec.hpp"
#include "pixht/grid.hpp"

namespace pixht {

inline constexpr const char* kLatitudeChannel = "latitude";
inline constexpr const char* kUpSinChannel = "up_sin";
inline constexpr const char* kUpCosChannel = "up_cos";
inline constexpr const char* kFrontHeightChannel = "height_front";
inline constexpr const char* kBackHeightChannel = "height_back";
inline constexpr const char* kMaskChannel = "mask";

// Rays closer than this to the zenith or nadir have no defined up direction.
inline constexpr double kZenithThresholdRad = 1e-5;

struct PerspectiveField {
  ScalarGrid latitude;  // 1 channel: radians, or [0, 1] when normalized
  ScalarGrid up;        // 2 channels: sin theta, cos theta
  bool normalized = false;

  int width() const { return latitude.width(); }
  int height() const { return latitude.height(); }
  bool valid(int x, int y) const { return latitude.valid(x, y) && up.valid(x, y); }

  double latitude_rad(int x, int y) const;
  // Unit image-space up vector decoded from the stored tuple.
  Vec2 up_vector(int x, int y) const;

  void validate() const;
};

struct PixelHeightMap {
  ScalarGrid front;  // 1 channel: pixels, or fraction of image height when normalized
  ScalarGrid back;
  ScalarGrid mask;   // 1 channel: 1 where the pixel belongs to the object
  bool normalized = false;

  int width() const { return front.width(); }
  int height() const { return front.height(); }
  bool in_mask(int x, int y) const { return mask.at(x, y) > 0.5f; }

  static PixelHeightMap zeros(int width, int height);
  void validate() const;
};

double latitude_at(Pixel p, const Camera& camera);
double latitude_at(Pixel p, const CameraIntrinsics& intr, const CameraPose& pose);

// Unit image-space direction of world-up at p, from the projection Jacobian
// applied to world +Z. Throws UndefinedDirectionError near the zenith/nadir.
Vec2 up_vector_at(Pixel p, const Camera& camera);
Vec2 up_vector_at(Pixel p, const CameraIntrinsics& intr, const CameraPose& pose);

// Dense field at every pixel center; degenerate pixels are flagged invalid.
PerspectiveField render_perspective_field(const Camera& camera, const Exec& exec = {});
PerspectiveField render_perspective_field(const CameraIntrinsics& intr, const CameraPose& pose,
                                          const Exec& exec = {});

struct UpTuple {
  double sin = 0.0;
  double cos = 1.0;
};

UpTuple encode_up_angle(double theta);
// Renormalizes before recovering the angle in (-pi, pi]. Throws DomainError
// unless sin^2 + cos^2 lies in [0.9, 1.1].
double decode_up_angle(UpTuple t);

Vec2 up_vector_from_angle(double theta);
double up_angle_from_vector(const Vec2& up);

// Pixel heights divided by image_height, latitude mapped from [-pi/2, pi/2]
// to [0, 1]. Up tuples are untouched. Throws StateError when already
// normalized (or not normalized, for the inverse).
std::pair<PixelHeightMap, PerspectiveField> normalize_fields(PixelHeightMap heights,
                                                             PerspectiveField field,
                                                             int image_height);
std::pair<PixelHeightMap, PerspectiveField> denormalize_fields(PixelHeightMap heights,
                                                               PerspectiveField field,
                                                               int image_height);

// Single-representation variants.
PerspectiveField normalize_field(PerspectiveField field);
PerspectiveField denormalize_field(PerspectiveField field);
PixelHeightMap normalize_heights(PixelHeightMap heights, int image_height);
PixelHeightMap denormalize_heights(PixelHeightMap heights, int image_height);

}  // namespace pixht
