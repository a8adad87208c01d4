#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"

namespace tamperscope::stats {

/// Linearly interpolated percentile, p in [0,100]. Takes a copy.
template <class T>
double percentile(std::span<const T> values, double p) {
  require(!values.empty(), ErrorKind::Argument, "percentile of empty set");
  std::vector<double> v(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - lo;
  std::nth_element(v.begin(), v.begin() + lo, v.end());
  const double a = v[lo];
  if (frac == 0.0 || lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + lo + 1, v.end());
  return a + frac * (b - a);
}

template <class T>
double median(std::span<const T> values) {
  return percentile(values, 50.0);
}

template <class T>
double mean(std::span<const T> values) {
  require(!values.empty(), ErrorKind::Argument, "mean of empty set");
  return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
}

/// Divides by `scale` and clamps to [0,1]; a non-positive scale yields zeros.
inline void normalize_by(std::vector<float>& v, double scale) {
  if (!(scale > 0.0)) {
    std::fill(v.begin(), v.end(), 0.0f);
    return;
  }
  for (float& x : v)
    x = static_cast<float>(std::clamp(x / scale, 0.0, 1.0));
}

/// Min-max normalization to [0,1]; a flat input maps to all zeros.
inline void normalize_minmax(std::vector<float>& v) {
  if (v.empty()) return;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double a = *lo, range = *hi - *lo;
  if (!(range > 0.0)) {
    std::fill(v.begin(), v.end(), 0.0f);
    return;
  }
  for (float& x : v) x = static_cast<float>((x - a) / range);
}

/// Nearest-neighbour expansion of a cell map to pixel resolution. Cell
/// (i,j) covers pixels [i*cell + offset, (i+1)*cell + offset); pixels
/// outside every cell take the value of the closest one.
template <class T>
Grid<float> expand_cells(const Grid<T>& cells, int cellW, int cellH,
                         int width, int height, int offsetX = 0,
                         int offsetY = 0) {
  Grid<float> out(width, height);
  for (int y = 0; y < height; ++y) {
    const int cy = std::clamp((y - offsetY) < 0 ? 0 : (y - offsetY) / cellH, 0,
                              cells.height() - 1);
    for (int x = 0; x < width; ++x) {
      const int cx = std::clamp((x - offsetX) < 0 ? 0 : (x - offsetX) / cellW,
                                0, cells.width() - 1);
      out(x, y) = static_cast<float>(cells(cx, cy));
    }
  }
  return out;
}

/// Ranks mapped to [0,1]; ties share their average rank.
inline std::vector<double> rank_normalize(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.5);
  if (n < 2) return out;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * (i + j) / static_cast<double>(n - 1);
    for (std::size_t k = i; k <= j; ++k) out[idx[k]] = r;
    i = j + 1;
  }
  return out;
}

}  // namespace tamperscope::stats
