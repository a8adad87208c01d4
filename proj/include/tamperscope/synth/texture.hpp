#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/raster.hpp"

namespace tamperscope::synth {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; turns structured seeds (seed ^ index) into
/// well-mixed generator seeds.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Sum of bilinearly interpolated random lattices with amplitude
/// proportional to lattice spacing, i.e. a 1/f spectrum. Zero mean, unit
/// standard deviation (approximately). Octaves coarser than `minCell`
/// only when `minCell` > 1.
inline Grid<float> fractal_noise(int width, int height, Rng& rng,
                                 int maxCell = 128, int minCell = 1) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Grid<double> acc(width, height);
  double var = 0.0;
  for (int cell = maxCell; cell >= minCell; cell /= 2) {
    const int lw = width / cell + 2, lh = height / cell + 2;
    Grid<double> lattice(lw, lh);
    for (double& v : lattice.vec()) v = n01(rng);
    const double amp = static_cast<double>(cell);
    for (int y = 0; y < height; ++y) {
      const double fy = static_cast<double>(y) / cell;
      const int y0 = static_cast<int>(fy);
      const double ty = fy - y0;
      for (int x = 0; x < width; ++x) {
        const double fx = static_cast<double>(x) / cell;
        const int x0 = static_cast<int>(fx);
        const double tx = fx - x0;
        const double top = lattice(x0, y0) * (1 - tx) + lattice(x0 + 1, y0) * tx;
        const double bot =
            lattice(x0, y0 + 1) * (1 - tx) + lattice(x0 + 1, y0 + 1) * tx;
        acc(x, y) += amp * (top * (1 - ty) + bot * ty);
      }
    }
    var += amp * amp * 0.44;  // bilinear interpolation keeps ~44% of variance
    if (cell == 1) break;
  }
  Grid<float> out(width, height);
  const double inv = 1.0 / std::sqrt(var);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.vec()[i] = static_cast<float>(acc.vec()[i] * inv);
  return out;
}

struct DeadLeavesConfig {
  double minRadius = 2.0;
  double maxRadius = 48.0;
  int leaves = 0;  // 0: derived from the image area
};

/// Occluding discs with power-law radii (p(r) ~ r^-3) and random colours.
/// Produces piecewise-flat content with sparse, heavy-tailed band-pass
/// statistics.
inline Raster dead_leaves(int width, int height, int channels, Rng& rng,
                          const DeadLeavesConfig& cfg = {}) {
  Raster out(width, height, channels, 128.0f);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int count = cfg.leaves > 0 ? cfg.leaves : width * height / 60;
  const double a = 1.0 / (cfg.minRadius * cfg.minRadius);
  const double b = 1.0 / (cfg.maxRadius * cfg.maxRadius);
  for (int k = 0; k < count; ++k) {
    // Inverse CDF of p(r) ~ r^-3 on [minRadius, maxRadius].
    const double r = 1.0 / std::sqrt(a - u01(rng) * (a - b));
    const double cx = u01(rng) * width, cy = u01(rng) * height;
    const double gray = 40.0 + 170.0 * u01(rng);
    double col[3] = {gray, gray, gray};
    if (channels == 3)
      for (double& c : col) c = std::clamp(gray + 40.0 * (u01(rng) - 0.5), 20.0, 235.0);
    const int x0 = std::max(0, static_cast<int>(cx - r));
    const int x1 = std::min(width - 1, static_cast<int>(cx + r));
    const int y0 = std::max(0, static_cast<int>(cy - r));
    const int y1 = std::min(height - 1, static_cast<int>(cy + r));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        if (dx * dx + dy * dy > r * r) continue;
        for (int c = 0; c < channels; ++c)
          out.at(x, y, c) = static_cast<float>(col[c]);
      }
  }
  return out;
}

}  // namespace tamperscope::synth
