#include "pixht/grid.hpp"

#include <cmath>
#include <string>

#include "pixht/error.hpp"

namespace pixht {

ScalarGrid::ScalarGrid(int width, int height, std::vector<std::string> channels, float fill)
    : width_(width), height_(height), channels_(std::move(channels)) {
  if (width < 1 || height < 1) throw DomainError("grid dimensions must be >= 1");
  if (channels_.empty()) throw DomainError("grid needs at least one channel");
  values_.assign(pixel_count() * channels_.size(), fill);
}

int ScalarGrid::channel_index(std::string_view name) const {
  for (size_t i = 0; i < channels_.size(); ++i)
    if (channels_[i] == name) return static_cast<int>(i);
  throw DomainError("grid has no channel named '" + std::string(name) + "'");
}

bool ScalarGrid::has_channel(std::string_view name) const {
  for (const auto& c : channels_)
    if (c == name) return true;
  return false;
}

std::span<float> ScalarGrid::plane(int c) {
  return std::span<float>(values_).subspan(static_cast<size_t>(c) * pixel_count(), pixel_count());
}

std::span<const float> ScalarGrid::plane(int c) const {
  return std::span<const float>(values_).subspan(static_cast<size_t>(c) * pixel_count(),
                                                 pixel_count());
}

void ScalarGrid::set_valid(int x, int y, bool v) {
  ensure_mask();
  mask_[static_cast<size_t>(y) * width_ + x] = v ? 1 : 0;
}

void ScalarGrid::ensure_mask() {
  if (mask_.empty()) mask_.assign(pixel_count(), 1);
}

ScalarGrid ScalarGrid::channel(int c) const {
  if (c < 0 || c >= channel_count()) throw DomainError("channel index out of range");
  ScalarGrid out(width_, height_, {channels_[static_cast<size_t>(c)]});
  const auto src = plane(c);
  std::copy(src.begin(), src.end(), out.values_.begin());
  out.mask_ = mask_;
  return out;
}

void ScalarGrid::validate() const {
  if (values_.size() != pixel_count() * channels_.size())
    throw DomainError("grid value count does not match width x height x channels");
  if (!mask_.empty() && mask_.size() != pixel_count())
    throw DomainError("grid mask size does not match pixel count");
  for (int c = 0; c < channel_count(); ++c)
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x)
        if (!std::isfinite(at(c, x, y)) && valid(x, y))
          throw DomainError("non-finite value at valid pixel (" + std::to_string(x) + ", " +
                            std::to_string(y) + ") in channel " + channels_[static_cast<size_t>(c)]);
}

void PointCloud::validate(int width, int height) const {
  if (!pixel_index.empty() && pixel_index.size() != points.size())
    throw DomainError("pixel_index length does not match point count");
  if (!colors.empty() && colors.size() != points.size())
    throw DomainError("color count does not match point count");
  for (const auto& p : points)
    if (!p.allFinite()) throw DomainError("point cloud contains a non-finite point");
  if (width > 0 && height > 0) {
    const std::int64_t limit = static_cast<std::int64_t>(width) * height;
    for (auto idx : pixel_index)
      if (idx < 0 || idx >= limit) throw DomainError("point source pixel outside the image");
  }
}

}  // namespace pixht
