#pragma once

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/raster.hpp"

namespace tamperscope::imaging {

// ITU-R BT.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline Luma to_luma(const Raster& img) {
  require(img.channels() == 1 || img.channels() == 3,
          ErrorKind::UnsupportedFormat, "to_luma expects 1 or 3 channels");
  if (img.channels() == 1) return Luma(img.plane(0));
  Luma out(img.width(), img.height());
  const auto s = img.samples();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.vec()[i] = static_cast<float>(kLumaR * s[3 * i] + kLumaG * s[3 * i + 1] +
                                      kLumaB * s[3 * i + 2]);
  }
  return out;
}

}  // namespace tamperscope::imaging
