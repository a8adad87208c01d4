#pragma once

#include <algorithm>
#include <cmath>

#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/raster.hpp"
#include "tamperscope/core/stats.hpp"
#include "tamperscope/imaging/codec.hpp"

namespace tamperscope::detectors {

inline constexpr int kDefaultElaQuality = 90;

/// Error level analysis: per-pixel recompression residual, scaled by its
/// 95th percentile.
inline HeatMap detect_ela(const Raster& img, int quality = kDefaultElaQuality) {
  const Raster src = img.quantized();
  const Raster rt = imaging::jpeg_roundtrip(src, quality);
  HeatMap out(img.width(), img.height());
  const int c = img.channels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    float m = 0.0f;
    for (int k = 0; k < c; ++k)
      m = std::max(m, std::abs(src.samples()[i * c + k] - rt.samples()[i * c + k]));
    out.vec()[i] = m;
  }
  const double p95 = stats::percentile<float>(out.vec(), 95.0);
  stats::normalize_by(out.vec(), p95);
  return out;
}

}  // namespace tamperscope::detectors
