#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "tamperscope/detectors.hpp"
#include "tamperscope/imaging.hpp"
#include "tamperscope/synth/corpora.hpp"

using namespace tamperscope;
using namespace testing_support;
namespace det = tamperscope::detectors;

namespace {

Grid<float> constant_plane(int w, int h, float v) { return Grid<float>(w, h, v); }

Grid<float> texture_plane(int size, std::uint64_t seed) {
  synth::Rng rng(synth::mix_seed(seed));
  return synth::make_base(synth::BaseContent::Texture, size, size, 1, rng).plane(0);
}

Grid<float> add_noise(Grid<float> g, double sigma, std::uint64_t seed,
                      int x0 = 0, int y0 = 0, int w = -1, int h = -1) {
  if (w < 0) w = g.width();
  if (h < 0) h = g.height();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) g(x, y) += static_cast<float>(n(rng));
  return g;
}

Grid<float> crop(const Grid<float>& g, int x0, int y0, int w, int h) {
  Grid<float> out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(x, y) = g(x0 + x, y0 + y);
  return out;
}

double fraction_within(const Grid<double>& sigma, double truth, double rel) {
  std::size_t ok = 0;
  for (double s : sigma.vec()) ok += std::abs(s - truth) <= rel * truth;
  return static_cast<double>(ok) / static_cast<double>(sigma.size());
}

}  // namespace

// ------------------------------------------------------------------- NOI1

TEST(Noi1, ConstantImageHasZeroSigmaAndMap) {
  const auto r = det::analyze_noi1(constant_plane(256, 256, 77.0f));
  for (double s : r.sigma.vec()) ASSERT_EQ(s, 0.0);
  for (float v : r.heatmap.vec()) ASSERT_EQ(v, 0.0f);
}

TEST(Noi1, MadEstimateWithinFifteenPercent) {
  for (double sigma : {2.0, 5.0, 10.0}) {
    const auto img = add_noise(constant_plane(512, 512, 128.0f), sigma, 100 + sigma);
    const auto r = det::analyze_noi1(img);
    EXPECT_GE(fraction_within(r.sigma, sigma, 0.15), 0.90) << "sigma " << sigma;
  }
}

TEST(Noi1, MinorityNoiseLevelScoresHigher) {
  // 2/3 of the frame at sigma 2 sets the global level; the rest at sigma 10.
  auto img = add_noise(constant_plane(384, 256, 128.0f), 2.0, 1, 0, 0, 256, 256);
  img = add_noise(img, 10.0, 2, 256, 0, 128, 256);
  const auto h = det::detect_noi1(img);
  const double left = region_mean(h, [](int x, int) { return x < 256; });
  const double right = region_mean(h, [](int x, int) { return x >= 256; });
  EXPECT_GT(right, left);
}

TEST(Noi1, SigmaInvariantToOffsetAndCovariantToScale) {
  const auto img = add_noise(texture_plane(256, 3), 4.0, 4);
  const auto base = det::analyze_noi1(img).sigma;
  auto shifted = img, scaled = img;
  for (float& v : shifted.vec()) v += 40.0f;
  for (float& v : scaled.vec()) v *= 2.5f;
  const auto a = det::analyze_noi1(shifted).sigma;
  const auto b = det::analyze_noi1(scaled).sigma;
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_NEAR(a.vec()[i], base.vec()[i], 1e-3 * (1 + base.vec()[i]));
    EXPECT_NEAR(b.vec()[i], 2.5 * base.vec()[i], 1e-3 * (1 + base.vec()[i]));
  }
}

TEST(Noi1, ShiftByOneBlockShiftsSigmaGrid) {
  // A block covers 2 * blockSize pixels of the image.
  const int bp = 2 * det::kDefaultNoi1Block;
  const auto src = add_noise(texture_plane(320, 5), 3.0, 6);
  const auto a = det::analyze_noi1(crop(src, bp, bp, 256, 256)).sigma;
  const auto b = det::analyze_noi1(crop(src, 0, 0, 256, 256)).sigma;
  for (int y = 0; y + 1 < b.height(); ++y)
    for (int x = 0; x + 1 < b.width(); ++x) ASSERT_NEAR(b(x + 1, y + 1), a(x, y), 1e-9);
}

TEST(Noi1, TooSmallRejected) {
  EXPECT_THROW(det::analyze_noi1(constant_plane(100, 100, 0.0f)), Error);
}

// ------------------------------------------------------------ band stats

TEST(BandStats, GaussianInputHasKurtosisNearThree) {
  const auto g = det::band_stats(noise_plane(256, 256, 128.0, 10.0, 7));
  for (int k = 1; k < 64; ++k) {
    double s = 0.0;
    for (const auto& w : g.windows) s += w.kurtosis[k];
    EXPECT_NEAR(s / g.windows.size(), 3.0, 0.3) << "band " << k;
  }
}

TEST(BandStats, ConstantInputHasZeroVarianceUndefinedKurtosis) {
  const auto g = det::band_stats(constant_plane(128, 128, 10.0f));
  for (const auto& w : g.windows)
    for (int k = 1; k < 64; ++k) {
      ASSERT_EQ(w.variance[k], 0.0);
      ASSERT_TRUE(std::isnan(w.kurtosis[k]));
    }
}

TEST(BandStats, MomentsMatchDirectEvaluation) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  const int n = 9;
  std::vector<double> coeffs(64 * n);
  for (double& c : coeffs) c = u(rng);
  det::BandStats s;
  det::band_moments(coeffs, n, s);
  for (int k = 1; k < 64; ++k) {
    long double mean = 0;
    for (int i = 0; i < n; ++i) mean += coeffs[64 * i + k];
    mean /= n;
    long double s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
      const long double d = coeffs[64 * i + k] - mean;
      s2 += d * d;
      s4 += d * d * d * d;
    }
    const double var = static_cast<double>(s2 / n);
    const double kurt = static_cast<double>(n * s4 / (s2 * s2));
    EXPECT_NEAR(s.variance[k], var, 1e-9 * var);
    EXPECT_NEAR(s.kurtosis[k], kurt, 1e-9 * kurt);
  }
}

TEST(BandStats, WindowGeometry) {
  const auto g = det::band_stats(noise_plane(256, 192, 0, 1, 9));
  EXPECT_EQ(g.span, 64);
  EXPECT_EQ(g.step, 32);
  EXPECT_EQ(g.windowsWide, 7);
  EXPECT_EQ(g.windowsHigh, 5);
  EXPECT_EQ(g.at(2, 3).x0, 64);
  EXPECT_EQ(g.at(2, 3).y0, 96);
  EXPECT_EQ(g.at(0, 0).count, 15 * 15);
}

// ------------------------------------------------------------------- NOI2

namespace {

det::BandStats fabricated(double a, double b) {
  det::BandStats s;
  s.count = 100;
  for (int k = 1; k < 64; ++k) {
    s.variance[k] = 10.0 + 3.0 * k;
    const double y = a - b / s.variance[k];
    s.kurtosis[k] = y * y + 3.0;
  }
  return s;
}

}  // namespace

TEST(Noi2, FitReproducesFabricatedLine) {
  const auto f = det::fit_kurtosis_line(fabricated(2.0, 5.0));
  ASSERT_TRUE(f.scored);
  EXPECT_EQ(f.bands, 63);
  EXPECT_NEAR(f.a, 2.0, 1e-9);
  EXPECT_NEAR(f.b, 5.0, 1e-9);
  EXPECT_NEAR(f.residual, 0.0, 1e-9);
  EXPECT_NEAR(f.noiseVariance, 2.5, 1e-9);
}

TEST(Noi2, NegativeSlopeClampsToZero) {
  const auto f = det::fit_kurtosis_line(fabricated(1.0, -4.0));
  ASSERT_TRUE(f.scored);
  EXPECT_LT(f.b, 0.0);
  EXPECT_EQ(f.noiseVariance, 0.0);
}

TEST(Noi2, TooFewBandsIsUnscored) {
  auto s = fabricated(2.0, 5.0);
  for (int k = 5; k < 64; ++k) s.variance[k] = 0.0;
  EXPECT_FALSE(det::fit_kurtosis_line(s).scored);
}

TEST(Noi2, CleanTextureEstimatesNearZero) {
  const auto clean = texture_plane(256, 10);
  const double v0 = det::analyze_noi2(clean).globalVariance;
  const double v5 = det::analyze_noi2(add_noise(clean, 5.0, 11)).globalVariance;
  EXPECT_GT(v5, 0.0);
  EXPECT_LE(v0, 0.10 * v5) << v0 << " vs " << v5;
}

TEST(Noi2, RegionalNoiseRaisesLocalEstimate) {
  const int x0 = 64, y0 = 64, side = 128;
  const auto img = add_noise(texture_plane(256, 12), 5.0, 13, x0, y0, side, side);
  const auto r = det::analyze_noi2(img);
  double in = 0, out = 0;
  int nin = 0, nout = 0;
  for (int j = 0; j < r.stats.windowsHigh; ++j)
    for (int i = 0; i < r.stats.windowsWide; ++i) {
      const auto& w = r.stats.at(i, j);
      const bool inside = w.x0 >= x0 && w.y0 >= y0 && w.x0 + w.span <= x0 + side &&
                          w.y0 + w.span <= y0 + side;
      const bool outside = w.x0 + w.span <= x0 || w.y0 + w.span <= y0 ||
                           w.x0 >= x0 + side || w.y0 >= y0 + side;
      if (inside) in += r.noiseVariance(i, j), ++nin;
      else if (outside) out += r.noiseVariance(i, j), ++nout;
    }
  ASSERT_GT(nin, 0);
  ASSERT_GT(nout, 0);
  EXPECT_GT(in / nin, 1.5 * (out / nout));
}

TEST(Noi2, HeatmapCoversFrame) {
  const auto h = det::detect_noi2(add_noise(texture_plane(200, 14), 2.0, 15));
  EXPECT_EQ(h.width(), 200);
  EXPECT_EQ(h.height(), 200);
  EXPECT_TRUE(h.valid());
}

// ------------------------------------------------------------------- NOI4

TEST(Noi4, ConstantImageHasZeroResidualAndMap) {
  const auto r = det::analyze_noi4(constant_plane(64, 64, 33.0f));
  for (float v : r.residual.vec()) ASSERT_EQ(v, 0.0f);
  for (float v : r.heatmap.vec()) ASSERT_EQ(v, 0.0f);
}

TEST(Noi4, SaltPixelsExposedExactly) {
  auto img = constant_plane(64, 64, 100.0f);
  const std::vector<std::pair<int, int>> salt = {{5, 5}, {20, 31}, {40, 12}, {58, 50}};
  for (auto [x, y] : salt) img(x, y) = 255.0f;
  const auto r = det::analyze_noi4(img);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const bool isSalt = std::find(salt.begin(), salt.end(), std::pair{x, y}) != salt.end();
      if (isSalt) ASSERT_FLOAT_EQ(r.residual(x, y), 155.0f);
      else ASSERT_EQ(r.residual(x, y), 0.0f);
    }
  // Blurred energy peaks at the salt and spreads around it.
  EXPECT_GT(r.energy(20, 31), r.energy(23, 31));
  EXPECT_GT(r.energy(23, 31), 0.0f);
}

TEST(Noi4, BlurredRegionScoresAboveBackground) {
  auto s = synth::matched_template(Algo::Noi4);
  s.width = s.height = 256;
  s.channels = 1;
  s.region = {80, 64, 96, 112};
  s.seed = 16;
  const auto f = synth::synth(s);
  const auto h = det::detect_noi4(f.image.plane(0));
  const double in = region_mean(h, [&](int x, int y) { return f.mask.on(x, y); });
  const double out = region_mean(h, [&](int x, int y) { return !f.mask.on(x, y); });
  EXPECT_GT(in, out);
}

TEST(Noi4, ShiftCovariantInInterior) {
  const auto src = add_noise(texture_plane(208, 17), 2.0, 18);
  const auto a = det::analyze_noi4(crop(src, 8, 8, 200, 200));
  const auto b = det::analyze_noi4(crop(src, 0, 0, 200, 200));
  // Away from the borders the filters see identical neighbourhoods.
  const int margin = 24;
  for (int y = margin; y < 200 - margin - 8; ++y)
    for (int x = margin; x < 200 - margin - 8; ++x) {
      ASSERT_EQ(b.residual(x + 8, y + 8), a.residual(x, y));
      ASSERT_NEAR(b.energy(x + 8, y + 8), a.energy(x, y), 1e-3);
    }
}
