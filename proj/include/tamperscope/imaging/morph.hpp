#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"

namespace tamperscope::imaging {

enum class MorphMode { Dilate, Erode };

namespace detail {

// Sliding max/min over a window of radius r along one line; samples
// outside [0,n) read as 0, which is "outside the mask" for both modes.
template <class Get, class Set>
void morph_line(int n, int r, bool takeMax, Get get, Set set) {
  std::deque<int> dq;  // indices, values monotone
  auto value = [&](int i) -> int { return (i < 0 || i >= n) ? 0 : get(i); };
  auto better = [&](int a, int b) { return takeMax ? a >= b : a <= b; };
  for (int i = -r; i < n + r; ++i) {
    const int v = value(i);
    while (!dq.empty() && better(v, value(dq.back()))) dq.pop_back();
    dq.push_back(i);
    const int center = i - r;
    if (center < 0) continue;
    while (dq.front() < center - r) dq.pop_front();
    set(center, value(dq.front()));
  }
}

}  // namespace detail

/// Binary morphology with an s x s square. Erosion treats the area beyond
/// the frame as outside the mask; dilation ignores it.
inline GTMask morph(const GTMask& mask, MorphMode mode, int s) {
  require(s >= 1 && s % 2 == 1, ErrorKind::Argument,
          "structuring element side must be odd and >= 1, got " +
              std::to_string(s));
  const int r = s / 2;
  const bool takeMax = mode == MorphMode::Dilate;
  const int w = mask.width(), h = mask.height();
  Grid<std::uint8_t> tmp(w, h);
  for (int y = 0; y < h; ++y)
    detail::morph_line(
        w, r, takeMax, [&](int i) { return int(mask(i, y)); },
        [&](int i, int v) { tmp(i, y) = static_cast<std::uint8_t>(v); });
  GTMask out(w, h);
  for (int x = 0; x < w; ++x)
    detail::morph_line(
        h, r, takeMax, [&](int i) { return int(tmp(x, i)); },
        [&](int i, int v) { out(x, i) = static_cast<std::uint8_t>(v); });
  return out;
}

}  // namespace tamperscope::imaging
