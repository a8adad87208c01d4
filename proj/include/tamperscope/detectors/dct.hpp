#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/stats.hpp"
#include "tamperscope/imaging/dct.hpp"

namespace tamperscope::detectors {

/// Estimated JPEG quantization steps, zig-zag order.
struct QuantTable {
  std::array<int, 64> steps{};
  std::array<double, 64> confidence{};
};

enum class QuantEstimator {
  ResidualThreshold,
  // Histogram periodicity is recognised by the config but not implemented;
  // selecting it raises an argument error.
  HistogramPeriodicity,
};

struct QuantEstimateConfig {
  QuantEstimator method = QuantEstimator::ResidualThreshold;
  double residualThreshold = 0.45;
  int maxStep = 127;
  /// A band needs at least this fraction of blocks with |D| >= 2 to be
  /// estimated at all; sparser bands get step 1 and confidence 0.
  double minActiveFraction = 0.005;
};

/// Mean quantization residual of one band's coefficients under step q.
inline double quant_residual(std::span<const double> coeffs, int q) {
  double s = 0.0;
  for (double d : coeffs) s += std::abs(d - q * std::nearbyint(d / q));
  return s / static_cast<double>(coeffs.size());
}

/// Per-band step estimate: the largest q whose mean residual stays within
/// the threshold. Confidence compares that residual against the q/4 mean
/// residual unquantized data would leave.
inline QuantTable estimate_qtable(const imaging::BlockDctGrid& grid,
                                  const QuantEstimateConfig& cfg = {}) {
  require(grid.block_count() > 0, ErrorKind::Argument,
          "quantization estimation needs a non-empty DCT grid");
  require(grid.block_count() >= 64, ErrorKind::Argument,
          "quantization estimation needs at least 64 blocks");
  require(cfg.method == QuantEstimator::ResidualThreshold, ErrorKind::Argument,
          "histogram-periodicity quantization estimation is not available");
  const std::size_t n = grid.block_count();
  QuantTable t;
  std::vector<double> band(n);
  for (int j = 0; j < 64; ++j) {
    std::size_t active = 0;
    for (std::size_t i = 0; i < n; ++i) {
      band[i] = grid.coeffs[64 * i + j];
      if (std::abs(band[i]) >= 2.0) ++active;
    }
    t.steps[j] = 1;
    t.confidence[j] = 0.0;
    if (static_cast<double>(active) < cfg.minActiveFraction * n || active < 4)
      continue;
    int best = 1;
    double bestR = quant_residual(band, 1);
    for (int q = 2; q <= cfg.maxStep; ++q) {
      const double r = quant_residual(band, q);
      if (r <= cfg.residualThreshold) best = q, bestR = r;
    }
    t.steps[j] = best;
    t.confidence[j] = std::clamp(1.0 - bestR / (best / 4.0), 0.0, 1.0);
  }
  return t;
}

/// Requantizes every coefficient with the table (bands with zero
/// confidence are left as they are).
inline void requantize(imaging::BlockDctGrid& grid, const QuantTable& t) {
  for (std::size_t i = 0; i < grid.block_count(); ++i) {
    auto b = grid.block(i);
    for (int j = 0; j < 64; ++j)
      if (t.confidence[j] > 0.0)
        b[j] = t.steps[j] * std::nearbyint(b[j] / t.steps[j]);
  }
}

/// Number of leading AC zig-zag bands that enter the blocking artifact measure.
inline constexpr int kBamBands = 16;

/// Blocking artifact measure per block: residual of the first AC bands
/// against the estimated table.
inline Grid<double> blocking_artifact_measure(const imaging::BlockDctGrid& grid,
                                              const QuantTable& t) {
  Grid<double> bam(grid.blocksWide, grid.blocksHigh);
  for (std::size_t i = 0; i < grid.block_count(); ++i) {
    const auto b = grid.block(i);
    double s = 0.0;
    for (int j = 1; j <= kBamBands; ++j) {
      if (!(t.confidence[j] > 0.0)) continue;
      const int q = t.steps[j];
      s += std::abs(b[j] - q * std::nearbyint(b[j] / q));
    }
    bam.vec()[i] = s;
  }
  return bam;
}

/// Keeps rounding-level residuals of a consistently quantized image from
/// being stretched to full scale.
inline constexpr double kBamNormalizerFloor = 1.0;

struct DctResult {
  QuantTable table;
  Grid<double> bam;
  HeatMap heatmap;
};

inline DctResult analyze_dct(const Grid<float>& img,
                             const QuantEstimateConfig& cfg = {}) {
  require(img.width() >= 32 && img.height() >= 32, ErrorKind::TooSmall,
          "DCT detector needs at least 32x32 pixels");
  const auto grid = imaging::block_dct8(img, 0, 0, true);
  DctResult r;
  r.table = estimate_qtable(grid, cfg);
  r.bam = blocking_artifact_measure(grid, r.table);
  Grid<float> cells(r.bam.width(), r.bam.height());
  std::transform(r.bam.vec().begin(), r.bam.vec().end(), cells.vec().begin(),
                 [](double v) { return static_cast<float>(v); });
  r.heatmap = HeatMap(stats::expand_cells(cells, 8, 8, img.width(), img.height()));
  const double p99 = stats::percentile<double>(r.bam.vec(), 99.0);
  stats::normalize_by(r.heatmap.vec(), std::max(p99, kBamNormalizerFloor));
  return r;
}

inline HeatMap detect_dct(const Grid<float>& img) {
  return analyze_dct(img).heatmap;
}

}  // namespace tamperscope::detectors
