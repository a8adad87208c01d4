#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tamperscope/core/error.hpp"

namespace tamperscope {

/// Dense row-major 2-D array. The building block for every single-plane
/// image type in the library.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    require(width >= 1 && height >= 1, ErrorKind::Argument,
            "grid dimensions must be positive, got " + std::to_string(width) +
                "x" + std::to_string(height));
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }
  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    require(width >= 1 && height >= 1, ErrorKind::Argument,
            "grid dimensions must be positive");
    require(data_.size() == static_cast<std::size_t>(width) * height,
            ErrorKind::Argument, "grid sample count does not match dimensions");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  /// Access with coordinates clamped to the frame (edge replication).
  const T& clamped(int x, int y) const noexcept {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return (*this)(x, y);
  }

  std::span<T> samples() noexcept { return data_; }
  std::span<const T> samples() const noexcept { return data_; }
  std::vector<T>& vec() noexcept { return data_; }
  const std::vector<T>& vec() const noexcept { return data_; }

  bool same_shape(const Grid& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Single-channel luminance plane, samples on the 0-255 scale.
struct Luma : Grid<float> {
  using Grid<float>::Grid;
  Luma() = default;
  explicit Luma(Grid<float> g) : Grid<float>(std::move(g)) {}
};

/// Per-pixel manipulation score in [0,1]; higher means more likely manipulated.
struct HeatMap : Grid<float> {
  using Grid<float>::Grid;
  HeatMap() = default;
  explicit HeatMap(Grid<float> g) : Grid<float>(std::move(g)) {}

  bool valid() const noexcept {
    return std::all_of(vec().begin(), vec().end(), [](float v) {
      return std::isfinite(v) && v >= 0.0f && v <= 1.0f;
    });
  }
};

/// Binary ground-truth mask: 255 marks manipulated pixels, 0 pristine.
struct GTMask : Grid<std::uint8_t> {
  static constexpr std::uint8_t kOn = 255;

  using Grid<std::uint8_t>::Grid;
  GTMask() = default;
  explicit GTMask(Grid<std::uint8_t> g) : Grid<std::uint8_t>(std::move(g)) {}

  bool on(int x, int y) const noexcept { return (*this)(x, y) != 0; }

  bool binary() const noexcept {
    return std::all_of(vec().begin(), vec().end(),
                       [](std::uint8_t v) { return v == 0 || v == kOn; });
  }

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(
        std::count(vec().begin(), vec().end(), kOn));
  }
};

}  // namespace tamperscope
