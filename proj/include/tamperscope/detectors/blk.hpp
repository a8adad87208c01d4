#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/stats.hpp"

namespace tamperscope::detectors {

struct BlkConfig {
  /// Blocks whose statistics are pooled around each 8x8 block (radius in
  /// blocks, 0 = the block alone).
  int poolRadius = 1;
};

/// Grid phase of the blocking artifact grid: column/row offset in [0,8).
struct GridPhase {
  int x = 0;
  int y = 0;
};

namespace detail {

struct SecondDifferences {
  Grid<float> horizontal;  // across columns
  Grid<float> vertical;    // across rows
};

inline SecondDifferences second_differences(const Grid<float>& img) {
  const int w = img.width(), h = img.height();
  SecondDifferences d{Grid<float>(w, h), Grid<float>(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 1; x + 1 < w; ++x)
      d.horizontal(x, y) =
          std::abs(2.0f * img(x, y) - img(x - 1, y) - img(x + 1, y));
  for (int y = 1; y + 1 < h; ++y)
    for (int x = 0; x < w; ++x)
      d.vertical(x, y) =
          std::abs(2.0f * img(x, y) - img(x, y - 1) - img(x, y + 1));
  return d;
}

}  // namespace detail

/// Global 8-periodic phase maximising the mean boundary energy.
inline GridPhase estimate_grid_phase(const Grid<float>& img) {
  require(img.width() >= 16 && img.height() >= 16, ErrorKind::TooSmall,
          "grid phase estimation needs at least 16x16 pixels");
  const auto d = detail::second_differences(img);
  std::array<double, 8> ex{}, ey{};
  std::array<std::size_t, 8> nx{}, ny{};
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      ex[x % 8] += d.horizontal(x, y);
      ++nx[x % 8];
      ey[y % 8] += d.vertical(x, y);
      ++ny[y % 8];
    }
  GridPhase p;
  double bx = -1, by = -1;
  for (int k = 0; k < 8; ++k) {
    if (ex[k] / nx[k] > bx) bx = ex[k] / nx[k], p.x = k;
    if (ey[k] / ny[k] > by) by = ey[k] / ny[k], p.y = k;
  }
  return p;
}

/// Blocking-artifact-grid mismatch map. Each 8x8 cell of the global grid is
/// scored by how much of its second-difference energy sits off the grid
/// lines relative to on them.
inline HeatMap detect_blk(const Grid<float>& img, const BlkConfig& cfg = {}) {
  require(img.width() >= 64 && img.height() >= 64, ErrorKind::TooSmall,
          "BLK needs at least 64x64 pixels");
  const GridPhase phase = estimate_grid_phase(img);
  const auto d = detail::second_differences(img);

  // Cells are anchored so that grid columns sit at the left edge of a cell.
  const int bw = (img.width() - phase.x) / 8, bh = (img.height() - phase.y) / 8;
  Grid<double> on(bw, bh), off(bw, bh);
  Grid<double> onN(bw, bh), offN(bw, bh);
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      double sOn = 0, sOff = 0;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const int px = phase.x + 8 * bx + x, py = phase.y + 8 * by + y;
          const double eh = d.horizontal(px, py), ev = d.vertical(px, py);
          (x == 0 ? sOn : sOff) += eh;
          (y == 0 ? sOn : sOff) += ev;
        }
      on(bx, by) = sOn;
      off(bx, by) = sOff;
    }

  Grid<double> score(bw, bh);
  const int r = cfg.poolRadius;
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      double sOn = 0, sOff = 0;
      for (int j = std::max(0, by - r); j <= std::min(bh - 1, by + r); ++j)
        for (int i = std::max(0, bx - r); i <= std::min(bw - 1, bx + r); ++i) {
          sOn += on(i, j);
          sOff += off(i, j);
        }
      // 16 on-grid and 112 off-grid samples per block
      const double mOn = sOn / 16.0, mOff = sOff / 112.0;
      score(bx, by) = (mOff - mOn) / (mOff + mOn + 1e-9);
    }

  HeatMap out(stats::expand_cells(score, 8, 8, img.width(), img.height(),
                                  phase.x, phase.y));
  stats::normalize_minmax(out.vec());
  return out;
}

}  // namespace tamperscope::detectors
