#include "pixht/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pixht/error.hpp"

namespace pixht {

namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

void require_same_dims(const ScalarGrid& a, const ScalarGrid& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DomainError(std::string(what) + ": grid dimensions differ");
}

}  // namespace

double PerspectiveField::latitude_rad(int x, int y) const {
  const double v = latitude.at(x, y);
  return normalized ? v * kPi - kPi / 2.0 : v;
}

Vec2 PerspectiveField::up_vector(int x, int y) const {
  const UpTuple t{up.at(0, x, y), up.at(1, x, y)};
  return up_vector_from_angle(decode_up_angle(t));
}

void PerspectiveField::validate() const {
  if (latitude.channel_count() != 1) throw DomainError("latitude grid must have one channel");
  if (up.channel_count() != 2) throw DomainError("up grid must have two channels");
  require_same_dims(latitude, up, "perspective field");
  latitude.validate();
  up.validate();
  const double lo = normalized ? 0.0 : -kPi / 2.0;
  const double hi = normalized ? 1.0 : kPi / 2.0;
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x) {
      if (latitude.valid(x, y)) {
        const double v = latitude.at(x, y);
        if (v < lo - 1e-6 || v > hi + 1e-6)
          throw DomainError("latitude outside its declared range");
      }
      if (up.valid(x, y)) {
        const double s = up.at(0, x, y), c = up.at(1, x, y);
        if (std::abs(s * s + c * c - 1.0) > 1e-4)
          throw DomainError("up tuple is not unit norm");
      }
    }
}

PixelHeightMap PixelHeightMap::zeros(int width, int height) {
  PixelHeightMap m;
  m.front = ScalarGrid(width, height, {kFrontHeightChannel});
  m.back = ScalarGrid(width, height, {kBackHeightChannel});
  m.mask = ScalarGrid(width, height, {kMaskChannel});
  return m;
}

void PixelHeightMap::validate() const {
  require_same_dims(front, back, "pixel height map");
  require_same_dims(front, mask, "pixel height map");
  front.validate();
  back.validate();
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x) {
      if (front.valid(x, y) && front.at(x, y) < 0.0f)
        throw DomainError("negative front pixel height");
      if (front.valid(x, y) && back.valid(x, y) && back.at(x, y) < 0.0f)
        throw DomainError("negative back pixel height");
    }
}

double latitude_at(Pixel p, const Camera& camera) {
  const Vec3 r = camera.unit_ray(p);
  return std::asin(std::clamp(r.z(), -1.0, 1.0));
}

double latitude_at(Pixel p, const CameraIntrinsics& intr, const CameraPose& pose) {
  return latitude_at(p, Camera(intr, pose));
}

Vec2 up_vector_at(Pixel p, const Camera& camera) {
  const Vec3 r = camera.ray(p);
  const double off_axis = std::atan2(std::hypot(r.x(), r.y()), std::abs(r.z()));
  if (off_axis < kZenithThresholdRad)
    throw UndefinedDirectionError("up vector undefined: ray within " +
                                  std::to_string(kZenithThresholdRad) +
                                  " rad of the zenith or nadir");
  // Jacobian of (x/z, y/z) at the camera-frame point (nx, ny, 1), applied to
  // world up; the component of up along the ray lies in its null space.
  const double nx = (p.x - camera.intrinsics().principal_point.x()) / camera.focal();
  const double ny = (p.y - camera.intrinsics().principal_point.y()) / camera.focal();
  const Vec3 u = camera.up_in_camera();
  const Vec2 d(u.x() - nx * u.z(), u.y() - ny * u.z());
  const double n = d.norm();
  if (!(n > 0.0)) throw UndefinedDirectionError("up vector undefined: zero image-space length");
  return d / n;
}

Vec2 up_vector_at(Pixel p, const CameraIntrinsics& intr, const CameraPose& pose) {
  return up_vector_at(p, Camera(intr, pose));
}

PerspectiveField render_perspective_field(const Camera& camera, const Exec& exec) {
  const int W = camera.width(), H = camera.height();
  PerspectiveField field;
  field.latitude = ScalarGrid(W, H, {kLatitudeChannel});
  field.up = ScalarGrid(W, H, {kUpSinChannel, kUpCosChannel});
  field.up.ensure_mask();
  parallel_for(exec, 0, H, [&](long row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < W; ++x) {
      const Pixel p = Pixel::center_of(x, y);
      field.latitude.at(x, y) = static_cast<float>(latitude_at(p, camera));
      try {
        const Vec2 up = up_vector_at(p, camera);
        const UpTuple t = encode_up_angle(up_angle_from_vector(up));
        field.up.at(0, x, y) = static_cast<float>(t.sin);
        field.up.at(1, x, y) = static_cast<float>(t.cos);
      } catch (const UndefinedDirectionError&) {
        field.up.at(0, x, y) = kNaN;
        field.up.at(1, x, y) = kNaN;
        field.up.set_valid(x, y, false);
      }
    }
  });
  return field;
}

PerspectiveField render_perspective_field(const CameraIntrinsics& intr, const CameraPose& pose,
                                          const Exec& exec) {
  return render_perspective_field(Camera(intr, pose), exec);
}

UpTuple encode_up_angle(double theta) {
  if (!std::isfinite(theta)) throw DomainError("up angle must be finite");
  const double t = std::remainder(theta, 2.0 * kPi);
  return {std::sin(t), std::cos(t)};
}

double decode_up_angle(UpTuple t) {
  const double n2 = t.sin * t.sin + t.cos * t.cos;
  if (!(n2 >= 0.9 && n2 <= 1.1))
    throw DomainError("up tuple norm^2 " + std::to_string(n2) + " outside [0.9, 1.1]");
  const double n = std::sqrt(n2);
  return std::atan2(t.sin / n, t.cos / n);
}

Vec2 up_vector_from_angle(double theta) { return {std::sin(theta), -std::cos(theta)}; }

double up_angle_from_vector(const Vec2& up) { return std::atan2(up.x(), -up.y()); }

PerspectiveField normalize_field(PerspectiveField field) {
  if (field.normalized) throw StateError("perspective field is already normalized");
  for (auto& v : field.latitude.values())
    if (std::isfinite(v)) v = static_cast<float>((static_cast<double>(v) + kPi / 2.0) / kPi);
  field.normalized = true;
  return field;
}

PerspectiveField denormalize_field(PerspectiveField field) {
  if (!field.normalized) throw StateError("perspective field is not normalized");
  for (auto& v : field.latitude.values())
    if (std::isfinite(v)) v = static_cast<float>(static_cast<double>(v) * kPi - kPi / 2.0);
  field.normalized = false;
  return field;
}

PixelHeightMap normalize_heights(PixelHeightMap heights, int image_height) {
  if (heights.normalized) throw StateError("pixel heights are already normalized");
  if (image_height < 1) throw DomainError("image height must be >= 1");
  const double H = image_height;
  for (auto* g : {&heights.front, &heights.back})
    for (auto& v : g->values()) v = static_cast<float>(static_cast<double>(v) / H);
  heights.normalized = true;
  return heights;
}

PixelHeightMap denormalize_heights(PixelHeightMap heights, int image_height) {
  if (!heights.normalized) throw StateError("pixel heights are not normalized");
  if (image_height < 1) throw DomainError("image height must be >= 1");
  const double H = image_height;
  for (auto* g : {&heights.front, &heights.back})
    for (auto& v : g->values()) v = static_cast<float>(static_cast<double>(v) * H);
  heights.normalized = false;
  return heights;
}

std::pair<PixelHeightMap, PerspectiveField> normalize_fields(PixelHeightMap heights,
                                                             PerspectiveField field,
                                                             int image_height) {
  if (heights.normalized || field.normalized) throw StateError("fields are already normalized");
  return {normalize_heights(std::move(heights), image_height), normalize_field(std::move(field))};
}

std::pair<PixelHeightMap, PerspectiveField> denormalize_fields(PixelHeightMap heights,
                                                               PerspectiveField field,
                                                               int image_height) {
  if (!heights.normalized || !field.normalized) throw StateError("fields are not normalized");
  return {denormalize_heights(std::move(heights), image_height),
          denormalize_field(std::move(field))};
}

}  // namespace pixht
