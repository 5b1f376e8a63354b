#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace pixht {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Multi-channel 32-bit float image. Storage is channel-planar and row-major:
// value(c, x, y) lives at c*W*H + y*W + x. An optional per-pixel validity mask
// marks where non-finite values are allowed.
class ScalarGrid {
 public:
  ScalarGrid() = default;
  ScalarGrid(int width, int height, std::vector<std::string> channels, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int channel_count() const { return static_cast<int>(channels_.size()); }
  size_t pixel_count() const { return static_cast<size_t>(width_) * static_cast<size_t>(height_); }
  bool empty() const { return values_.empty(); }

  const std::vector<std::string>& channels() const { return channels_; }
  // Index of a named channel; throws DomainError when absent.
  int channel_index(std::string_view name) const;
  bool has_channel(std::string_view name) const;

  float& at(int c, int x, int y) { return values_[offset(c, x, y)]; }
  float at(int c, int x, int y) const { return values_[offset(c, x, y)]; }
  float& at(int x, int y) { return at(0, x, y); }
  float at(int x, int y) const { return at(0, x, y); }

  std::span<float> plane(int c);
  std::span<const float> plane(int c) const;
  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }

  bool has_mask() const { return !mask_.empty(); }
  // Pixels are valid unless a mask exists and marks them otherwise.
  bool valid(int x, int y) const {
    return mask_.empty() || mask_[static_cast<size_t>(y) * width_ + x] != 0;
  }
  void set_valid(int x, int y, bool v);
  // Allocates an all-valid mask if none exists.
  void ensure_mask();
  void clear_mask() { mask_.clear(); }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  // Copy of a single channel (keeps the mask).
  ScalarGrid channel(int c) const;
  ScalarGrid channel(std::string_view name) const { return channel(channel_index(name)); }

  // Throws DomainError on a size mismatch or a non-finite value at a valid pixel.
  void validate() const;

 private:
  size_t offset(int c, int x, int y) const {
    return (static_cast<size_t>(c) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::string> channels_;
  std::vector<float> values_;
  std::vector<std::uint8_t> mask_;
};

// Point set in the camera-centered world frame. `pixel_index` (row-major
// y*W + x of the source pixel) and `colors` are either empty or parallel to
// `points`.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<std::int64_t> pixel_index;
  std::vector<std::array<std::uint8_t, 3>> colors;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_pixels() const { return !pixel_index.empty(); }
  bool has_colors() const { return !colors.empty(); }

  void add(const Vec3& p) { points.push_back(p); }
  void add(const Vec3& p, std::int64_t pixel) {
    points.push_back(p);
    pixel_index.push_back(pixel);
  }

  // Throws DomainError on non-finite points, mismatched side arrays, or pixel
  // indices outside a width x height image (pass 0 to skip the bounds check).
  void validate(int width = 0, int height = 0) const;
};

// Horizontal ground plane z = z_const. Reconstructions place it at -1 (unit
// camera height); ray-traced scenes place it at 0.
struct GroundPlane {
  double z_const = -1.0;

  static GroundPlane reconstruction() { return {-1.0}; }
  static GroundPlane scene() { return {0.0}; }
};

}  // namespace pixht
