#pragma once

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"

namespace tamperscope::imaging {

/// One level of the orthonormal 2-D Haar transform. Odd trailing rows and
/// columns are dropped.
struct HaarLevel {
  Grid<float> ll, lh, hl, hh;
};

inline HaarLevel haar2d(const Grid<float>& img) {
  require(img.width() >= 2 && img.height() >= 2, ErrorKind::Argument,
          "Haar transform needs at least a 2x2 image");
  const int w = img.width() / 2, h = img.height() / 2;
  HaarLevel out{Grid<float>(w, h), Grid<float>(w, h), Grid<float>(w, h),
                Grid<float>(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double a = img(2 * x, 2 * y), b = img(2 * x + 1, 2 * y);
      const double c = img(2 * x, 2 * y + 1), d = img(2 * x + 1, 2 * y + 1);
      out.ll(x, y) = static_cast<float>((a + b + c + d) / 2.0);
      out.lh(x, y) = static_cast<float>((a + b - c - d) / 2.0);
      out.hl(x, y) = static_cast<float>((a - b + c - d) / 2.0);
      out.hh(x, y) = static_cast<float>((a - b - c + d) / 2.0);
    }
  return out;
}

/// Diagonal high-pass subband at half resolution.
inline Grid<float> haar_hh(const Grid<float>& img) {
  require(img.width() >= 2 && img.height() >= 2, ErrorKind::Argument,
          "haar_hh needs at least a 2x2 image");
  const int w = img.width() / 2, h = img.height() / 2;
  Grid<float> out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double a = img(2 * x, 2 * y), b = img(2 * x + 1, 2 * y);
      const double c = img(2 * x, 2 * y + 1), d = img(2 * x + 1, 2 * y + 1);
      out(x, y) = static_cast<float>((a - b - c + d) / 2.0);
    }
  return out;
}

}  // namespace tamperscope::imaging
