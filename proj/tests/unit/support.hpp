#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/raster.hpp"

namespace testing_support {

using tamperscope::Grid;
using tamperscope::GTMask;
using tamperscope::Raster;

inline Grid<float> noise_plane(int w, int h, double mean, double sigma,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(mean, sigma);
  Grid<float> g(w, h);
  for (float& v : g.vec()) v = static_cast<float>(n(rng));
  return g;
}

inline Grid<float> uniform_plane(int w, int h, double lo, double hi,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Grid<float> g(w, h);
  for (float& v : g.vec()) v = static_cast<float>(u(rng));
  return g;
}

inline GTMask random_mask(int w, int h, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(p);
  GTMask m(w, h);
  for (auto& v : m.vec()) v = b(rng) ? GTMask::kOn : 0;
  return m;
}

inline GTMask rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
  GTMask m(w, h);
  for (int y = y0; y < y0 + rh; ++y)
    for (int x = x0; x < x0 + rw; ++x) m(x, y) = GTMask::kOn;
  return m;
}

inline double mse(const Raster& a, const Raster& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    const double d = a.samples()[i] - b.samples()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.samples().size());
}

template <class G, class Pred>
double region_mean(const G& g, const Pred& inside) {
  double s = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x)
      if (inside(x, y)) {
        s += g(x, y);
        ++n;
      }
  return n ? s / static_cast<double>(n) : 0.0;
}

}  // namespace testing_support
