#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/raster.hpp"
#include "tamperscope/core/stats.hpp"
#include "tamperscope/imaging/filter.hpp"

namespace tamperscope::detectors {

enum class BayerPattern { RGGB, GRBG, GBRG, BGGR };

/// Priority order; the first entry wins ties.
inline constexpr std::array<BayerPattern, 4> kBayerPatterns = {
    BayerPattern::RGGB, BayerPattern::GRBG, BayerPattern::GBRG,
    BayerPattern::BGGR};

inline const char* to_string(BayerPattern p) noexcept {
  switch (p) {
    case BayerPattern::RGGB: return "RGGB";
    case BayerPattern::GRBG: return "GRBG";
    case BayerPattern::GBRG: return "GBRG";
    case BayerPattern::BGGR: return "BGGR";
  }
  return "?";
}

/// Colour plane (0 R, 1 G, 2 B) sensed at pixel (x, y).
inline int bayer_channel(BayerPattern p, int x, int y) noexcept {
  static constexpr int kLayout[4][2][2] = {
      {{0, 1}, {1, 2}},  // RGGB
      {{1, 0}, {2, 1}},  // GRBG
      {{1, 2}, {0, 1}},  // GBRG
      {{2, 1}, {1, 0}},  // BGGR
  };
  return kLayout[static_cast<int>(p)][y & 1][x & 1];
}

/// Green sites of the pattern sit where (x + y) has this parity.
inline int green_parity(BayerPattern p) noexcept {
  return bayer_channel(p, 0, 0) == 1 ? 0 : 1;
}

/// Samples the sensed colour of every pixel into a single mosaic plane.
inline Grid<float> mosaic(const Raster& img, BayerPattern p) {
  require(img.channels() == 3, ErrorKind::UnsupportedFormat,
          "mosaic needs a 3-channel image");
  Grid<float> out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out(x, y) = img.at(x, y, bayer_channel(p, x, y));
  return out;
}

/// Bilinear demosaicing of a Bayer mosaic (reflect-101 borders).
inline Raster demosaic_bilinear(const Grid<float>& cfa, BayerPattern p) {
  const int w = cfa.width(), h = cfa.height();
  Raster out(w, h, 3);
  // Kernels act on zero-filled sparse planes.
  static constexpr double kG[3][3] = {{0, .25, 0}, {.25, 1, .25}, {0, .25, 0}};
  static constexpr double kRB[3][3] = {
      {.25, .5, .25}, {.5, 1, .5}, {.25, .5, .25}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int own = bayer_channel(p, x, y);
      for (int c = 0; c < 3; ++c) {
        if (c == own) {
          out.at(x, y, c) = cfa(x, y);
          continue;
        }
        const auto& k = c == 1 ? kG : kRB;
        double s = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (k[dy + 1][dx + 1] == 0.0) continue;
            // Reflect-101 keeps the Bayer parity of mirrored neighbours.
            const int sx = imaging::reflect101(x + dx, w);
            const int sy = imaging::reflect101(y + dy, h);
            if (bayer_channel(p, sx, sy) == c) s += k[dy + 1][dx + 1] * cfa(sx, sy);
          }
        out.at(x, y, c) = static_cast<float>(s);
      }
    }
  return out;
}

/// Green prediction error: G minus the mean of its four direct neighbours.
inline Grid<float> green_prediction_error(const Raster& img) {
  const int w = img.width(), h = img.height();
  Grid<float> e(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double pred =
          0.25 * (img.at(imaging::reflect101(x - 1, w), y, 1) +
                  img.at(imaging::reflect101(x + 1, w), y, 1) +
                  img.at(x, imaging::reflect101(y - 1, h), 1) +
                  img.at(x, imaging::reflect101(y + 1, h), 1));
      e(x, y) = static_cast<float>(img.at(x, y, 1) - pred);
    }
  return e;
}

// ------------------------------------------------------------------ CFA1

struct Cfa1Config {
  int blockSize = 16;
  /// F2 value expected where interpolation structure is gone.
  double idealNoiseRatio = 1.0;
};

struct Cfa1Result {
  BayerPattern pattern = BayerPattern::RGGB;
  std::array<double, 4> totalError{};
  Grid<double> f1;  // per block
  Grid<double> f2;  // per block
  HeatMap heatmap;
};

/// Squared re-interpolation error per pixel after re-mosaicing with `p`.
inline Grid<double> reinterpolation_error(const Raster& img, BayerPattern p) {
  const Raster re = demosaic_bilinear(mosaic(img, p), p);
  Grid<double> err(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = img.at(x, y, c) - re.at(x, y, c);
        s += d * d;
      }
      err(x, y) = s;
    }
  return err;
}

/// Global pattern by minimum total re-interpolation error, ties resolved
/// in kBayerPatterns order.
inline BayerPattern estimate_bayer_pattern(const Raster& img,
                                           std::array<double, 4>* totals = nullptr) {
  require(img.channels() == 3, ErrorKind::UnsupportedFormat,
          "Bayer pattern estimation needs a 3-channel image");
  std::array<double, 4> t{};
  for (int k = 0; k < 4; ++k) {
    const auto err = reinterpolation_error(img, kBayerPatterns[k]);
    for (double v : err.vec()) t[k] += v;
  }
  int best = 0;
  for (int k = 1; k < 4; ++k)
    if (t[k] < t[best]) best = k;
  if (totals) *totals = t;
  return kBayerPatterns[best];
}

inline Cfa1Result analyze_cfa1(const Raster& img, const Cfa1Config& cfg = {}) {
  require(img.channels() == 3, ErrorKind::UnsupportedFormat,
          "CFA1 needs a 3-channel image");
  const int bs = cfg.blockSize;
  require(bs >= 2, ErrorKind::Argument, "CFA1 block size must be >= 2");
  require(img.width() >= 4 * bs && img.height() >= 4 * bs, ErrorKind::TooSmall,
          "CFA1 needs at least 4 blocks per side");
  const int bw = img.width() / bs, bh = img.height() / bs;

  Cfa1Result r;
  std::array<Grid<double>, 4> blockErr;
  for (int k = 0; k < 4; ++k) {
    const auto err = reinterpolation_error(img, kBayerPatterns[k]);
    blockErr[k] = Grid<double>(bw, bh);
    for (int y = 0; y < bh * bs; ++y)
      for (int x = 0; x < bw * bs; ++x) blockErr[k](x / bs, y / bs) += err(x, y);
    for (double v : err.vec()) r.totalError[k] += v;
  }
  int best = 0;
  for (int k = 1; k < 4; ++k)
    if (r.totalError[k] < r.totalError[best]) best = k;
  r.pattern = kBayerPatterns[best];

  const auto e = green_prediction_error(img);
  const int gpar = green_parity(r.pattern);
  r.f1 = Grid<double>(bw, bh);
  r.f2 = Grid<double>(bw, bh);
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      double mean = 0.0;
      for (int k = 0; k < 4; ++k) mean += blockErr[k](bx, by) / 4.0;
      r.f1(bx, by) = mean > 1e-12 ? blockErr[best](bx, by) / mean : 1.0;

      // Variance of the green residual at interpolated vs sensed sites.
      double s[2] = {0, 0}, s2[2] = {0, 0};
      int n[2] = {0, 0};
      for (int y = by * bs; y < (by + 1) * bs; ++y)
        for (int x = bx * bs; x < (bx + 1) * bs; ++x) {
          const int sensed = ((x + y) & 1) == gpar ? 1 : 0;
          s[sensed] += e(x, y);
          s2[sensed] += double(e(x, y)) * e(x, y);
          ++n[sensed];
        }
      auto var = [&](int c) {
        const double m = s[c] / n[c];
        return std::max(s2[c] / n[c] - m * m, 1e-8);
      };
      r.f2(bx, by) = var(0) / var(1);
    }

  std::vector<double> a(r.f1.vec()), b(r.f2.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    b[i] = 1.0 - std::abs(r.f2.vec()[i] - cfg.idealNoiseRatio);
  const auto ra = stats::rank_normalize(a);
  const auto rb = stats::rank_normalize(b);
  Grid<double> score(bw, bh);
  for (std::size_t i = 0; i < score.size(); ++i)
    score.vec()[i] = 0.5 * ra[i] + 0.5 * rb[i];
  r.heatmap = HeatMap(stats::expand_cells(score, bs, bs, img.width(), img.height()));
  return r;
}

inline HeatMap detect_cfa1(const Raster& img, int blockSize = 16) {
  return analyze_cfa1(img, Cfa1Config{blockSize}).heatmap;
}

// ------------------------------------------------------------------ CFA2

inline constexpr double kVarianceFloor = 1e-8;

/// Local variance of the green prediction error, per pixel, using a
/// Gaussian window restricted to sites of the same green lattice.
inline Grid<double> lattice_local_variance(const Grid<float>& e,
                                           double sigma = 1.5, int radius = 3) {
  const int w = e.width(), h = e.height();
  std::vector<double> wk((2 * radius + 1) * (2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      wk[(dy + radius) * (2 * radius + 1) + dx + radius] =
          ((dx + dy) & 1) ? 0.0
                          : std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
  Grid<double> v(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double sw = 0, s1 = 0, s2 = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= w) continue;
          const double wt = wk[(dy + radius) * (2 * radius + 1) + dx + radius];
          if (wt == 0.0) continue;
          const double ev = e(xx, yy);
          sw += wt;
          s1 += wt * ev;
          s2 += wt * ev * ev;
        }
      }
      const double m = s1 / sw;
      v(x, y) = std::max(s2 / sw - m * m, kVarianceFloor);
    }
  return v;
}

struct Cfa2Config {
  /// Side of the square neighbourhood, in 2x2 blocks, over which the
  /// geometric means are taken.
  int neighborhoodBlocks = 8;
};

/// Log-ratio of geometric-mean local variances at sensed versus
/// interpolated green sites, one value per 2x2 block.
inline Grid<double> cfa2_feature(const Raster& img, BayerPattern pattern,
                                 const Cfa2Config& cfg = {}) {
  require(img.channels() == 3, ErrorKind::UnsupportedFormat,
          "CFA2 needs a 3-channel image");
  require(img.width() >= 2 && img.height() >= 2, ErrorKind::TooSmall,
          "CFA2 needs at least one 2x2 block");
  const auto e = green_prediction_error(img);
  const auto var = lattice_local_variance(e);
  const int gpar = green_parity(pattern);
  const int bw = img.width() / 2, bh = img.height() / 2;

  // Per-block sums, then box sums over the neighbourhood via integral images.
  Grid<double> sumA(bw, bh), sumI(bw, bh), nA(bw, bh), nI(bw, bh), nFloor(bw, bh);
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx)
      for (int y = 2 * by; y < 2 * by + 2; ++y)
        for (int x = 2 * bx; x < 2 * bx + 2; ++x) {
          const double lv = std::log(var(x, y));
          if (((x + y) & 1) == gpar) {
            sumA(bx, by) += lv;
            nA(bx, by) += 1;
          } else {
            sumI(bx, by) += lv;
            nI(bx, by) += 1;
          }
          if (var(x, y) <= kVarianceFloor) nFloor(bx, by) += 1;
        }

  auto integral = [&](const Grid<double>& g) {
    Grid<double> s(bw + 1, bh + 1);
    for (int y = 0; y < bh; ++y)
      for (int x = 0; x < bw; ++x)
        s(x + 1, y + 1) = g(x, y) + s(x, y + 1) + s(x + 1, y) - s(x, y);
    return s;
  };
  const auto iA = integral(sumA), iI = integral(sumI), inA = integral(nA),
             inI = integral(nI), iF = integral(nFloor);
  auto box = [](const Grid<double>& s, int x0, int y0, int x1, int y1) {
    return s(x1, y1) - s(x0, y1) - s(x1, y0) + s(x0, y0);
  };

  const int half = cfg.neighborhoodBlocks / 2;
  Grid<double> L(bw, bh);
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      const int x0 = std::max(0, bx - half), y0 = std::max(0, by - half);
      const int x1 = std::min(bw, bx - half + cfg.neighborhoodBlocks);
      const int y1 = std::min(bh, by - half + cfg.neighborhoodBlocks);
      const double na = box(inA, x0, y0, x1, y1), ni = box(inI, x0, y0, x1, y1);
      if (box(iF, x0, y0, x1, y1) >= na + ni) {
        L(bx, by) = 0.0;
        continue;
      }
      L(bx, by) = box(iA, x0, y0, x1, y1) / na - box(iI, x0, y0, x1, y1) / ni;
    }
  return L;
}

/// Two-component 1-D Gaussian mixture. Component 0 has the higher mean
/// ("CFA present"), component 1 the lower one.
struct GmmFit {
  std::array<double, 2> mean{};
  std::array<double, 2> variance{};
  double weight0 = 0.5;  // mixing weight of component 0
  std::vector<double> logLikelihood;  // mean per-sample LL, one per iteration
  int iterations = 0;

  /// Posterior of component 1 for value x.
  double posterior_low(double x) const {
    const double l0 = std::log(weight0) - 0.5 * std::log(2 * std::numbers::pi * variance[0]) -
                      0.5 * (x - mean[0]) * (x - mean[0]) / variance[0];
    const double l1 = std::log(1 - weight0) -
                      0.5 * std::log(2 * std::numbers::pi * variance[1]) -
                      0.5 * (x - mean[1]) * (x - mean[1]) / variance[1];
    const double m = std::max(l0, l1);
    const double p0 = std::exp(l0 - m), p1 = std::exp(l1 - m);
    return p1 / (p0 + p1);
  }

  double pooled_std() const {
    return std::sqrt(weight0 * variance[0] + (1 - weight0) * variance[1]);
  }
};

struct GmmConfig {
  int maxIterations = 200;
  double tolerance = 1e-6;
  double varianceFloor = kVarianceFloor;
};

/// EM fit initialised at the 25th/75th percentiles with equal weights and a
/// shared variance.
inline GmmFit fit_gmm2(std::span<const double> x, const GmmConfig& cfg = {}) {
  require(x.size() >= 2, ErrorKind::Argument, "GMM fit needs at least 2 samples");
  const std::size_t n = x.size();
  GmmFit f;
  // Internally component a starts low, b high; reordered at the end.
  double mu[2] = {stats::percentile<double>(x, 25.0),
                  stats::percentile<double>(x, 75.0)};
  const double m = stats::mean<double>(x);
  double total = 0.0;
  for (double v : x) total += (v - m) * (v - m);
  const double shared = std::max(total / n, cfg.varianceFloor);
  double var[2] = {shared, shared};
  double pi[2] = {0.5, 0.5};

  std::vector<double> resp(n);
  constexpr double kLog2Pi = 1.8378770664093453;
  double prevLL = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.maxIterations; ++it) {
    // E step
    double ll = 0.0;
    const double c0 = std::log(pi[0]) - 0.5 * (kLog2Pi + std::log(var[0]));
    const double c1 = std::log(pi[1]) - 0.5 * (kLog2Pi + std::log(var[1]));
    for (std::size_t i = 0; i < n; ++i) {
      const double l0 = c0 - 0.5 * (x[i] - mu[0]) * (x[i] - mu[0]) / var[0];
      const double l1 = c1 - 0.5 * (x[i] - mu[1]) * (x[i] - mu[1]) / var[1];
      const double mx = std::max(l0, l1);
      const double p0 = std::exp(l0 - mx), p1 = std::exp(l1 - mx);
      resp[i] = p1 / (p0 + p1);
      ll += mx + std::log(p0 + p1);
    }
    ll /= static_cast<double>(n);
    f.logLikelihood.push_back(ll);
    f.iterations = it + 1;
    if (ll - prevLL < cfg.tolerance) break;
    prevLL = ll;

    // M step
    double r1 = 0.0, s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r1 += resp[i];
      s1 += resp[i] * x[i];
      s0 += (1 - resp[i]) * x[i];
    }
    const double r0 = static_cast<double>(n) - r1;
    if (r0 < 1e-12 || r1 < 1e-12) break;  // one component collapsed to nothing
    mu[0] = s0 / r0;
    mu[1] = s1 / r1;
    double v0 = 0.0, v1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v0 += (1 - resp[i]) * (x[i] - mu[0]) * (x[i] - mu[0]);
      v1 += resp[i] * (x[i] - mu[1]) * (x[i] - mu[1]);
    }
    var[0] = std::max(v0 / r0, cfg.varianceFloor);
    var[1] = std::max(v1 / r1, cfg.varianceFloor);
    pi[0] = r0 / n;
    pi[1] = r1 / n;
  }

  const int hi = mu[1] >= mu[0] ? 1 : 0, lo = 1 - hi;
  f.mean = {mu[hi], mu[lo]};
  f.variance = {var[hi], var[lo]};
  f.weight0 = pi[hi];
  return f;
}

struct Cfa2Result {
  BayerPattern pattern = BayerPattern::RGGB;
  Grid<double> feature;
  GmmFit fit;
  bool degenerate = false;
  HeatMap heatmap;
};

struct Cfa2DetectConfig {
  Cfa2Config feature;
  GmmConfig gmm;
  /// Mean separation below this multiple of the pooled std is degenerate.
  double minSeparation = 0.1;
  /// The "CFA present" mean must exceed this log-ratio for the fit to be
  /// meaningful; below it no block shows interpolation structure.
  double minPresentLogRatio = 0.5;
};

inline Cfa2Result analyze_cfa2(const Raster& img, const Cfa2DetectConfig& cfg = {}) {
  require(img.channels() == 3, ErrorKind::UnsupportedFormat,
          "CFA2 needs a 3-channel image");
  require(static_cast<long>(img.width() / 2) * (img.height() / 2) >= 64,
          ErrorKind::TooSmall, "CFA2 needs at least 64 2x2 blocks");
  Cfa2Result r;
  r.pattern = estimate_bayer_pattern(img);
  r.feature = cfa2_feature(img, r.pattern, cfg.feature);
  r.fit = fit_gmm2(r.feature.vec(), cfg.gmm);
  const double sep = r.fit.mean[0] - r.fit.mean[1];
  r.degenerate = sep < cfg.minSeparation * r.fit.pooled_std() ||
                 r.fit.mean[0] < cfg.minPresentLogRatio;
  Grid<double> post(r.feature.width(), r.feature.height(), 0.5);
  if (!r.degenerate)
    for (std::size_t i = 0; i < post.size(); ++i)
      post.vec()[i] = r.fit.posterior_low(r.feature.vec()[i]);
  r.heatmap = HeatMap(stats::expand_cells(post, 2, 2, img.width(), img.height()));
  return r;
}

inline HeatMap detect_cfa2(const Raster& img) { return analyze_cfa2(img).heatmap; }

}  // namespace tamperscope::detectors
