#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"

namespace tamperscope::imaging {

/// k x k median with edge replication.
inline Grid<float> median_filter(const Grid<float>& img, int k) {
  require(k >= 3 && k % 2 == 1, ErrorKind::Argument,
          "median window must be odd and >= 3, got " + std::to_string(k));
  const int r = k / 2;
  Grid<float> out(img.width(), img.height());
  std::vector<float> win(static_cast<std::size_t>(k) * k);
  const auto mid = win.begin() + win.size() / 2;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      std::size_t n = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) win[n++] = img.clamped(x + dx, y + dy);
      std::nth_element(win.begin(), mid, win.end());
      out(x, y) = *mid;
    }
  return out;
}

/// Normalised 1-D Gaussian taps, radius ceil(3 sigma) unless given.
inline std::vector<double> gaussian_kernel(double sigma, int radius = -1) {
  require(sigma > 0.0, ErrorKind::Argument, "gaussian sigma must be positive");
  if (radius < 0) radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Separable convolution with a symmetric kernel, edge replication.
inline Grid<float> separable_filter(const Grid<float>& img,
                                    const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size() / 2);
  const int w = img.width(), h = img.height();
  Grid<double> tmp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += taps[i + r] * img.clamped(x + i, y);
      tmp(x, y) = s;
    }
  Grid<float> out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += taps[i + r] * tmp.clamped(x, y + i);
      out(x, y) = static_cast<float>(s);
    }
  return out;
}

inline Grid<float> gaussian_blur(const Grid<float>& img, double sigma) {
  return separable_filter(img, gaussian_kernel(sigma));
}

/// Reflect-101 index: -1 -> 1, n -> n-2. Keeps the parity of the index,
/// which Bayer-lattice code relies on.
inline int reflect101(int i, int n) noexcept {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

/// Bilinear resampling by a scale factor (output size rounded).
inline Grid<float> resize_bilinear(const Grid<float>& img, int outW, int outH) {
  require(outW >= 1 && outH >= 1, ErrorKind::Argument,
          "resize target must be positive");
  Grid<float> out(outW, outH);
  const double sx = static_cast<double>(img.width()) / outW;
  const double sy = static_cast<double>(img.height()) / outH;
  for (int y = 0; y < outH; ++y) {
    const double fy = std::max(0.0, (y + 0.5) * sy - 0.5);
    const int y0 = std::min(static_cast<int>(fy), img.height() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < outW; ++x) {
      const double fx = std::max(0.0, (x + 0.5) * sx - 0.5);
      const int x0 = std::min(static_cast<int>(fx), img.width() - 1);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double tx = fx - x0;
      const double top = img(x0, y0) * (1 - tx) + img(x1, y0) * tx;
      const double bot = img(x0, y1) * (1 - tx) + img(x1, y1) * tx;
      out(x, y) = static_cast<float>(top * (1 - ty) + bot * ty);
    }
  }
  return out;
}

template <class T>
Grid<T> resize_nearest(const Grid<T>& img, int outW, int outH) {
  require(outW >= 1 && outH >= 1, ErrorKind::Argument,
          "resize target must be positive");
  Grid<T> out(outW, outH);
  for (int y = 0; y < outH; ++y) {
    const int sy = std::min(
        static_cast<int>((y + 0.5) * img.height() / outH), img.height() - 1);
    for (int x = 0; x < outW; ++x) {
      const int sx = std::min(static_cast<int>((x + 0.5) * img.width() / outW),
                              img.width() - 1);
      out(x, y) = img(sx, sy);
    }
  }
  return out;
}

}  // namespace tamperscope::imaging
