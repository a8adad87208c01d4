#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"

namespace tamperscope::imaging {

using Block8 = std::array<double, 64>;

/// Zig-zag scan: kZigZag[k] is the row-major index of the k-th coefficient.
inline constexpr std::array<int, 64> kZigZag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

namespace detail {

struct DctBasis {
  // basis[u][x] = c(u) cos((2x+1) u pi / 16)
  std::array<std::array<double, 8>, 8> m{};
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      const double c = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x)
        m[u][x] = c * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    }
  }
};

inline const DctBasis& basis() {
  static const DctBasis b;
  return b;
}

}  // namespace detail

/// Orthonormal 2-D DCT-II of a row-major 8x8 block; output row-major.
inline Block8 dct8x8(const Block8& in) {
  const auto& m = detail::basis().m;
  Block8 tmp{}, out{};
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += m[u][x] * in[y * 8 + x];
      tmp[y * 8 + u] = s;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += m[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = s;
    }
  return out;
}

/// Inverse of dct8x8.
inline Block8 idct8x8(const Block8& in) {
  const auto& m = detail::basis().m;
  Block8 tmp{}, out{};
  for (int v = 0; v < 8; ++v)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int u = 0; u < 8; ++u) s += m[u][x] * in[v * 8 + u];
      tmp[v * 8 + x] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int v = 0; v < 8; ++v) s += m[v][y] * tmp[v * 8 + x];
      out[y * 8 + x] = s;
    }
  return out;
}

inline Block8 to_zigzag(const Block8& rowMajor) {
  Block8 z{};
  for (int k = 0; k < 64; ++k) z[k] = rowMajor[kZigZag[k]];
  return z;
}

inline Block8 from_zigzag(const Block8& zig) {
  Block8 r{};
  for (int k = 0; k < 64; ++k) r[kZigZag[k]] = zig[k];
  return r;
}

/// Per-block DCT coefficients of every complete 8x8 block of a plane.
struct BlockDctGrid {
  int blocksWide = 0;
  int blocksHigh = 0;
  int originX = 0;
  int originY = 0;
  bool levelShifted = false;
  std::vector<double> coeffs;  // 64 per block, zig-zag order

  std::size_t block_count() const noexcept {
    return static_cast<std::size_t>(blocksWide) * blocksHigh;
  }
  std::span<const double> block(std::size_t i) const noexcept {
    return {coeffs.data() + 64 * i, 64};
  }
  std::span<double> block(std::size_t i) noexcept {
    return {coeffs.data() + 64 * i, 64};
  }
  std::span<const double> block(int bx, int by) const noexcept {
    return block(static_cast<std::size_t>(by) * blocksWide + bx);
  }
};

inline BlockDctGrid block_dct8(const Grid<float>& img, int originX = 0,
                               int originY = 0, bool levelShift = true) {
  require(originX >= 0 && originX < 8 && originY >= 0 && originY < 8,
          ErrorKind::Argument, "DCT grid origin must lie in [0,8)");
  BlockDctGrid g;
  g.originX = originX;
  g.originY = originY;
  g.levelShifted = levelShift;
  g.blocksWide = (img.width() - originX) / 8;
  g.blocksHigh = (img.height() - originY) / 8;
  require(g.blocksWide >= 1 && g.blocksHigh >= 1, ErrorKind::EmptyGrid,
          "image smaller than one 8x8 block after origin offset");
  g.coeffs.resize(64 * g.block_count());
  const double shift = levelShift ? 128.0 : 0.0;
  Block8 px{};
  for (int by = 0; by < g.blocksHigh; ++by)
    for (int bx = 0; bx < g.blocksWide; ++bx) {
      const int x0 = originX + 8 * bx, y0 = originY + 8 * by;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          px[y * 8 + x] = img(x0 + x, y0 + y) - shift;
      const Block8 z = to_zigzag(dct8x8(px));
      std::copy(z.begin(), z.end(),
                g.coeffs.begin() +
                    64 * (static_cast<std::size_t>(by) * g.blocksWide + bx));
    }
  return g;
}

/// Writes the inverse transform of every block back into `img` (pixels
/// outside the block grid are left untouched).
inline void inverse_block_dct8(const BlockDctGrid& g, Grid<float>& img) {
  const double shift = g.levelShifted ? 128.0 : 0.0;
  Block8 z{};
  for (int by = 0; by < g.blocksHigh; ++by)
    for (int bx = 0; bx < g.blocksWide; ++bx) {
      const auto c = g.block(bx, by);
      std::copy(c.begin(), c.end(), z.begin());
      const Block8 px = idct8x8(from_zigzag(z));
      const int x0 = g.originX + 8 * bx, y0 = g.originY + 8 * by;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          img(x0 + x, y0 + y) = static_cast<float>(px[y * 8 + x] + shift);
    }
}

}  // namespace tamperscope::imaging
