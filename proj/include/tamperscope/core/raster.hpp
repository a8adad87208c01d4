#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"

namespace tamperscope {

/// Decoded image with 1 or 3 interleaved channels, float samples on the
/// 0-255 scale.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, float fill = 0.0f)
      : width_(width), height_(height), channels_(channels) {
    check_shape();
    samples_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }
  Raster(int width, int height, int channels, std::vector<float> samples)
      : width_(width), height_(height), channels_(channels),
        samples_(std::move(samples)) {
    check_shape();
    require(samples_.size() ==
                static_cast<std::size_t>(width) * height * channels,
            ErrorKind::Argument, "raster sample count does not match shape");
    require(std::all_of(samples_.begin(), samples_.end(),
                        [](float v) { return std::isfinite(v); }),
            ErrorKind::Argument, "raster samples must be finite");
  }

  /// Single-channel raster from a plane.
  static Raster from_plane(const Grid<float>& plane) {
    return Raster(plane.width(), plane.height(), 1, plane.vec());
  }

  /// Three-channel raster from separate planes.
  static Raster from_planes(const Grid<float>& r, const Grid<float>& g,
                            const Grid<float>& b) {
    require(r.same_shape(g) && r.same_shape(b), ErrorKind::Argument,
            "planes differ in shape");
    Raster out(r.width(), r.height(), 3);
    for (std::size_t i = 0; i < r.size(); ++i) {
      out.samples_[3 * i + 0] = r.vec()[i];
      out.samples_[3 * i + 1] = g.vec()[i];
      out.samples_[3 * i + 2] = b.vec()[i];
    }
    return out;
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }

  float& at(int x, int y, int c) noexcept {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int x, int y, int c) const noexcept {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<float> samples() noexcept { return samples_; }
  std::span<const float> samples() const noexcept { return samples_; }

  Grid<float> plane(int c) const {
    Grid<float> out(width_, height_);
    for (std::size_t i = 0; i < pixel_count(); ++i)
      out.vec()[i] = samples_[i * channels_ + c];
    return out;
  }

  void set_plane(int c, const Grid<float>& p) {
    require(p.width() == width_ && p.height() == height_, ErrorKind::Argument,
            "plane shape mismatch");
    for (std::size_t i = 0; i < pixel_count(); ++i)
      samples_[i * channels_ + c] = p.vec()[i];
  }

  /// Rounds and clamps every sample to the representable 8-bit range.
  std::vector<std::uint8_t> to_u8() const {
    std::vector<std::uint8_t> out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(), [](float v) {
      return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    });
    return out;
  }

  /// Copy with every sample rounded to the nearest 8-bit level.
  Raster quantized() const {
    Raster out = *this;
    for (float& v : out.samples_)
      v = static_cast<float>(std::clamp(std::lround(v), 0L, 255L));
    return out;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  void check_shape() const {
    require(width_ >= 1 && height_ >= 1, ErrorKind::Argument,
            "raster dimensions must be positive");
    require(channels_ == 1 || channels_ == 3, ErrorKind::UnsupportedFormat,
            "raster must have 1 or 3 channels, got " +
                std::to_string(channels_));
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> samples_;
};

}  // namespace tamperscope
