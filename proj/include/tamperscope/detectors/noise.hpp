#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/stats.hpp"
#include "tamperscope/imaging/dct.hpp"
#include "tamperscope/imaging/filter.hpp"
#include "tamperscope/imaging/wavelet.hpp"

namespace tamperscope::detectors {

// Median absolute deviation of a zero-mean Gaussian is 0.6745 sigma.
inline constexpr double kMadToSigma = 0.6745;

// ------------------------------------------------------------------ NOI1

inline constexpr int kDefaultNoi1Block = 16;

struct Noi1Result {
  Grid<double> sigma;  // per HH block
  double globalSigma = 0.0;
  HeatMap heatmap;
};

/// Local noise level from the diagonal Haar subband: MAD estimate per
/// block, scored by deviation from the image-wide median level.
inline Noi1Result analyze_noi1(const Grid<float>& img,
                               int blockSize = kDefaultNoi1Block) {
  require(blockSize >= 2, ErrorKind::Argument, "NOI1 block size must be >= 2");
  require(img.width() >= 2 * 8 * blockSize && img.height() >= 2 * 8 * blockSize,
          ErrorKind::TooSmall,
          "NOI1 needs at least " + std::to_string(16 * blockSize) +
              " pixels per side");
  const auto hh = imaging::haar_hh(img);
  const int bw = hh.width() / blockSize, bh = hh.height() / blockSize;
  Noi1Result r;
  r.sigma = Grid<double>(bw, bh);
  std::vector<float> buf(static_cast<std::size_t>(blockSize) * blockSize);
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      std::size_t n = 0;
      for (int y = 0; y < blockSize; ++y)
        for (int x = 0; x < blockSize; ++x)
          buf[n++] = std::abs(hh(bx * blockSize + x, by * blockSize + y));
      r.sigma(bx, by) = stats::median<float>(buf) / kMadToSigma;
    }
  r.globalSigma = stats::median<double>(r.sigma.vec());
  Grid<float> dev(bw, bh);
  for (std::size_t i = 0; i < dev.size(); ++i)
    dev.vec()[i] = static_cast<float>(std::abs(r.sigma.vec()[i] - r.globalSigma));
  const double p99 = stats::percentile<float>(dev.vec(), 99.0);
  r.heatmap = HeatMap(stats::expand_cells(dev, 2 * blockSize, 2 * blockSize,
                                          img.width(), img.height()));
  stats::normalize_by(r.heatmap.vec(), p99);
  return r;
}

inline HeatMap detect_noi1(const Grid<float>& img,
                           int blockSize = kDefaultNoi1Block) {
  return analyze_noi1(img, blockSize).heatmap;
}

// ------------------------------------------------------------------ NOI2

/// Band statistics of one analysis window. Index 0 (DC) is not populated.
struct BandStats {
  int x0 = 0, y0 = 0, span = 0;  // window origin and side in pixels
  int count = 0;                 // coefficients per band
  std::array<double, 64> variance{};
  std::array<double, 64> kurtosis{};  // non-excess; NaN when undefined
};

struct BandStatsConfig {
  /// Window side in units of 8-pixel blocks.
  int windowBlocks = 8;
  /// Pixel spacing of the (overlapping) DCT blocks inside a window.
  int stride = 4;
};

struct BandStatsGrid {
  int windowsWide = 0, windowsHigh = 0;
  int step = 0;  // pixel step between window origins
  int span = 0;
  std::vector<BandStats> windows;  // row-major

  const BandStats& at(int wx, int wy) const {
    return windows[static_cast<std::size_t>(wy) * windowsWide + wx];
  }
};

/// Band variances below this are DCT round-off on flat content.
inline constexpr double kBandVarianceFloor = 1e-12;

/// Sample variance (1/n) and kurtosis m4/m2^2 of each AC band.
inline void band_moments(std::span<const double> coeffs, int count,
                         BandStats& out) {
  out.count = count;
  out.variance.fill(0.0);
  out.kurtosis.fill(std::numeric_limits<double>::quiet_NaN());
  for (int k = 1; k < 64; ++k) {
    double mean = 0.0;
    for (int i = 0; i < count; ++i) mean += coeffs[64 * i + k];
    mean /= count;
    double m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < count; ++i) {
      const double d = coeffs[64 * i + k] - mean;
      const double d2 = d * d;
      m2 += d2;
      m4 += d2 * d2;
    }
    m2 /= count;
    m4 /= count;
    if (m2 < kBandVarianceFloor) m2 = 0.0;
    out.variance[k] = m2;
    if (count >= 4 && m2 > 0.0) out.kurtosis[k] = m4 / (m2 * m2);
  }
}

/// Windowed DCT band statistics. Windows span windowBlocks*8 pixels and
/// advance by half their span; inside each, level-shifted 8x8 DCT blocks
/// are taken every `stride` pixels.
inline BandStatsGrid band_stats(const Grid<float>& img,
                                const BandStatsConfig& cfg = {}) {
  require(cfg.windowBlocks >= 2 && cfg.stride >= 1 && cfg.stride <= 8,
          ErrorKind::Argument, "band_stats: windowBlocks >= 2, stride in 1..8");
  const int span = cfg.windowBlocks * 8;
  require(img.width() >= span && img.height() >= span, ErrorKind::TooSmall,
          "band_stats needs at least " + std::to_string(span) +
              " pixels per side");
  const int step = span / 2;
  BandStatsGrid g;
  g.span = span;
  g.step = step;
  g.windowsWide = (img.width() - span) / step + 1;
  g.windowsHigh = (img.height() - span) / step + 1;

  // DCT of every block on the stride lattice.
  const int nx = (img.width() - 8) / cfg.stride + 1;
  const int ny = (img.height() - 8) / cfg.stride + 1;
  std::vector<double> all(static_cast<std::size_t>(nx) * ny * 64);
  imaging::Block8 px{};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          px[y * 8 + x] = img(i * cfg.stride + x, j * cfg.stride + y) - 128.0;
      const auto z = imaging::to_zigzag(imaging::dct8x8(px));
      std::copy(z.begin(), z.end(),
                all.begin() + 64 * (static_cast<std::size_t>(j) * nx + i));
    }

  const int per = (span - 8) / cfg.stride + 1;
  std::vector<double> win(static_cast<std::size_t>(per) * per * 64);
  g.windows.resize(static_cast<std::size_t>(g.windowsWide) * g.windowsHigh);
  for (int wy = 0; wy < g.windowsHigh; ++wy)
    for (int wx = 0; wx < g.windowsWide; ++wx) {
      BandStats& s = g.windows[static_cast<std::size_t>(wy) * g.windowsWide + wx];
      s.x0 = wx * step;
      s.y0 = wy * step;
      s.span = span;
      int n = 0;
      for (int j = 0; j < per; ++j)
        for (int i = 0; i < per; ++i) {
          const int bi = (s.x0 + i * cfg.stride) / cfg.stride;
          const int bj = (s.y0 + j * cfg.stride) / cfg.stride;
          const double* src = &all[64 * (static_cast<std::size_t>(bj) * nx + bi)];
          std::copy(src, src + 64, win.begin() + 64 * n);
          ++n;
        }
      band_moments(win, n, s);
    }
  return g;
}

struct KurtosisFit {
  double a = 0.0;  // intercept: sqrt of the clean-signal kurtosis
  double b = 0.0;  // slope magnitude: a * noise variance
  int bands = 0;   // usable bands entering the fit
  double residual = 0.0;  // RMS residual of the line
  double noiseVariance = 0.0;
  bool scored = false;
};

struct Noi2Config {
  BandStatsConfig window;
  double minBandVariance = 1e-6;
  int minCount = 16;
  int minBands = 8;
  /// Lower bound on the heatmap normaliser, in variance units.
  double normalizerFloor = 4.0;
};

/// Least-squares fit of sqrt(excess kurtosis) = a - b / variance across
/// bands. Gaussian noise has zero excess kurtosis, so under additive white
/// noise with variance s2 the observed excess obeys k_obs = k (v - s2)^2 / v^2,
/// which is exactly that line with b = a * s2. BandStats keeps the
/// non-excess value; the shift by 3 happens here.
inline KurtosisFit fit_kurtosis_line(const BandStats& s, const Noi2Config& cfg = {}) {
  KurtosisFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (int k = 1; k < 64; ++k) {
    if (!(s.variance[k] > cfg.minBandVariance) || s.count < cfg.minCount ||
        !std::isfinite(s.kurtosis[k]))
      continue;
    const double x = 1.0 / s.variance[k];
    const double y = std::sqrt(std::max(s.kurtosis[k] - 3.0, 0.0));
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  f.bands = static_cast<int>(pts.size());
  if (f.bands < cfg.minBands) return f;
  const double n = f.bands;
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) return f;
  const double slope = (n * sxy - sx * sy) / den;
  f.a = (sy - slope * sx) / n;
  f.b = -slope;
  double rss = 0.0;
  for (auto [x, y] : pts) {
    const double d = y - (f.a - f.b * x);
    rss += d * d;
  }
  f.residual = std::sqrt(rss / n);
  f.noiseVariance = std::max(f.b / std::max(f.a, 1e-6), 0.0);
  f.scored = true;
  return f;
}

struct Noi2Result {
  BandStatsGrid stats;
  Grid<double> noiseVariance;  // per window, 0 where unscored
  double globalVariance = 0.0;
  HeatMap heatmap;
};

inline Noi2Result analyze_noi2(const Grid<float>& img, const Noi2Config& cfg = {}) {
  Noi2Result r;
  r.stats = band_stats(img, cfg.window);
  const int ww = r.stats.windowsWide, wh = r.stats.windowsHigh;
  r.noiseVariance = Grid<double>(ww, wh);
  std::vector<double> scored;
  for (int j = 0; j < wh; ++j)
    for (int i = 0; i < ww; ++i) {
      const auto f = fit_kurtosis_line(r.stats.at(i, j), cfg);
      r.noiseVariance(i, j) = f.scored ? f.noiseVariance : 0.0;
      if (f.scored) scored.push_back(f.noiseVariance);
    }
  r.globalVariance = scored.empty() ? 0.0 : stats::median<double>(scored);
  Grid<float> dev(ww, wh);
  for (std::size_t i = 0; i < dev.size(); ++i)
    dev.vec()[i] = static_cast<float>(
        std::abs(r.noiseVariance.vec()[i] - r.globalVariance));
  const double norm = std::max({stats::percentile<float>(dev.vec(), 99.0),
                                r.globalVariance, cfg.normalizerFloor});
  const int offset = (r.stats.span - r.stats.step) / 2;
  r.heatmap = HeatMap(stats::expand_cells(dev, r.stats.step, r.stats.step,
                                          img.width(), img.height(), offset,
                                          offset));
  stats::normalize_by(r.heatmap.vec(), norm);
  return r;
}

inline HeatMap detect_noi2(const Grid<float>& img) {
  return analyze_noi2(img).heatmap;
}

// ------------------------------------------------------------------ NOI4

struct Noi4Result {
  Grid<float> residual;
  Grid<float> energy;
  HeatMap heatmap;
};

inline Noi4Result analyze_noi4(const Grid<float>& img, double sigma = 4.0) {
  require(img.width() >= 3 && img.height() >= 3, ErrorKind::TooSmall,
          "NOI4 needs at least 3x3 pixels");
  Noi4Result r;
  const auto med = imaging::median_filter(img, 3);
  r.residual = Grid<float>(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i)
    r.residual.vec()[i] = std::abs(img.vec()[i] - med.vec()[i]);
  r.energy = imaging::gaussian_blur(r.residual, sigma);
  const double m = stats::median<float>(r.energy.vec());
  r.heatmap = HeatMap(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i)
    r.heatmap.vec()[i] = static_cast<float>(std::abs(r.energy.vec()[i] - m));
  const double p99 = stats::percentile<float>(r.heatmap.vec(), 99.0);
  stats::normalize_by(r.heatmap.vec(), p99);
  return r;
}

inline HeatMap detect_noi4(const Grid<float>& img) {
  return analyze_noi4(img).heatmap;
}

}  // namespace tamperscope::detectors
