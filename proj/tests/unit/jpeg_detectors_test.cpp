#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tamperscope/detectors.hpp"
#include "tamperscope/imaging.hpp"
#include "tamperscope/synth/forgery.hpp"

using namespace tamperscope;
using namespace testing_support;

namespace {

// Annex K luminance table, natural (row-major) order.
constexpr int kStdLuma[64] = {16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,
                              58, 60, 55, 14, 13, 16,  24,  40,  57, 69, 56, 14, 17,
                              22, 29, 51, 87, 80, 62,  18,  22,  37, 56, 68, 109, 103,
                              77, 24, 35, 55, 64, 81,  104, 113, 92, 49, 64, 78,  87,
                              103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

// libjpeg's quality scaling, zig-zag order.
std::array<int, 64> scaled_luma_table(int quality) {
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> zz{};
  for (int k = 0; k < 64; ++k) {
    const int v = (kStdLuma[imaging::kZigZag[k]] * scale + 50) / 100;
    zz[k] = std::clamp(v, 1, 255);
  }
  return zz;
}

Raster textured(int size, std::uint64_t seed) {
  synth::Rng rng(synth::mix_seed(seed));
  return synth::make_base(synth::BaseContent::Texture, size, size, 1, rng).quantized();
}

// Texture plus i.i.d. grain, so every DCT band carries energy.
Raster grainy(int size, std::uint64_t seed, double sigma = 25.0) {
  Raster r = textured(size, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  for (float& v : r.samples()) v = static_cast<float>(v + n(rng));
  return r.quantized();
}

imaging::BlockDctGrid synthetic_grid(int blocks, std::uint64_t seed,
                                     const std::function<double(int, std::mt19937_64&)>& band) {
  imaging::BlockDctGrid g;
  g.blocksWide = blocks;
  g.blocksHigh = 1;
  g.levelShifted = true;
  g.coeffs.resize(64 * static_cast<std::size_t>(blocks));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < blocks; ++i)
    for (int j = 0; j < 64; ++j) g.coeffs[64 * i + j] = band(j, rng);
  return g;
}

}  // namespace

// ------------------------------------------------------------- quant table

TEST(QuantTable, RecoversSyntheticStep) {
  std::normal_distribution<double> n(0.0, 20.0);
  const auto g = synthetic_grid(256, 1, [&](int j, std::mt19937_64& rng) {
    const double d = n(rng);
    return j == 5 ? 7.0 * std::nearbyint(d / 7.0) : d;
  });
  const auto t = detectors::estimate_qtable(g);
  EXPECT_EQ(t.steps[5], 7);
  EXPECT_GT(t.confidence[5], 0.5);
}

TEST(QuantTable, ContinuousCoefficientsGiveStepOne) {
  std::normal_distribution<double> n(0.0, 20.0);
  const auto g = synthetic_grid(256, 2, [&](int, std::mt19937_64& rng) { return n(rng); });
  const auto t = detectors::estimate_qtable(g);
  for (int j = 0; j < 64; ++j) EXPECT_EQ(t.steps[j], 1) << "band " << j;
}

TEST(QuantTable, ZeroBandIsSentinel) {
  std::normal_distribution<double> n(0.0, 20.0);
  const auto g = synthetic_grid(128, 3, [&](int j, std::mt19937_64& rng) {
    return j == 9 ? 0.0 : n(rng);
  });
  const auto t = detectors::estimate_qtable(g);
  EXPECT_EQ(t.steps[9], 1);
  EXPECT_EQ(t.confidence[9], 0.0);
}

TEST(QuantTable, EmptyGridIsAnArgumentError) {
  imaging::BlockDctGrid g;
  try {
    detectors::estimate_qtable(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Argument);
  }
}

TEST(QuantTable, HistogramMethodIsAStub) {
  std::normal_distribution<double> n(0.0, 20.0);
  const auto g = synthetic_grid(128, 4, [&](int, std::mt19937_64& rng) { return n(rng); });
  detectors::QuantEstimateConfig cfg;
  cfg.method = detectors::QuantEstimator::HistogramPeriodicity;
  EXPECT_THROW(detectors::estimate_qtable(g, cfg), Error);
}

TEST(QuantTable, ConfidenceWithinUnitInterval) {
  const auto img = imaging::jpeg_roundtrip(textured(256, 5), 80);
  const auto t = detectors::estimate_qtable(imaging::block_dct8(imaging::to_luma(img)));
  for (int j = 0; j < 64; ++j) {
    EXPECT_GE(t.steps[j], 1);
    EXPECT_GE(t.confidence[j], 0.0);
    EXPECT_LE(t.confidence[j], 1.0);
  }
}

TEST(QuantTable, RecoversQuality75TableFromDecodedPixels) {
  const auto img = imaging::jpeg_roundtrip(grainy(512, 6), 75);
  const auto t = detectors::estimate_qtable(imaging::block_dct8(imaging::to_luma(img)));
  const auto truth = scaled_luma_table(75);
  int exact = 0;
  for (int j = 0; j < 64; ++j) exact += t.steps[j] == truth[j];
  EXPECT_GE(exact, 58) << "exact steps: " << exact;
}

// --------------------------------------------------------------------- DCT

TEST(DctDetector, ConsistentQuantizationScoresNearZero) {
  // Pixels built from exactly quantized coefficients, kept in float.
  const auto table = scaled_luma_table(75);
  auto grid = imaging::block_dct8(imaging::to_luma(grainy(256, 7)));
  for (std::size_t i = 0; i < grid.block_count(); ++i) {
    auto b = grid.block(i);
    for (int j = 0; j < 64; ++j) b[j] = table[j] * std::nearbyint(b[j] / table[j]);
  }
  Grid<float> img(256, 256);
  imaging::inverse_block_dct8(grid, img);
  const auto h = detectors::detect_dct(img);
  EXPECT_LE(stats::mean<float>(h.vec()), 0.05);
}

TEST(DctDetector, RequantizedImageKeepsItsMeasure) {
  const auto table = scaled_luma_table(60);
  auto grid = imaging::block_dct8(imaging::to_luma(grainy(256, 8)));
  for (std::size_t i = 0; i < grid.block_count(); ++i) {
    auto b = grid.block(i);
    for (int j = 0; j < 64; ++j) b[j] = table[j] * std::nearbyint(b[j] / table[j]);
  }
  Grid<float> img(256, 256);
  imaging::inverse_block_dct8(grid, img);
  const auto r1 = detectors::analyze_dct(img);
  auto g2 = imaging::block_dct8(img);
  detectors::requantize(g2, r1.table);
  Grid<float> img2(256, 256);
  imaging::inverse_block_dct8(g2, img2);
  const auto r2 = detectors::analyze_dct(img2);
  EXPECT_LE(std::abs(stats::mean<double>(r1.bam.vec()) - stats::mean<double>(r2.bam.vec())),
            1e-6);
}

TEST(DctDetector, SplicedRegionStandsOut) {
  synth::SynthSpec s;
  s.width = s.height = 256;
  s.op = synth::ForgeryOp::Splice;
  s.region = {96, 64, 96, 112};
  s.hostChain = {synth::ChainStep::jpeg(60)};
  s.donorChain = {synth::ChainStep::jpeg(95)};
  s.post = {synth::ChainStep::jpeg(95)};
  s.seed = 12;
  const auto r = synth::synth(s);
  const auto res = detectors::analyze_dct(imaging::to_luma(r.image));
  const auto in = [&](int bx, int by) { return r.mask.on(8 * bx + 4, 8 * by + 4); };
  const double inside = region_mean(res.bam, in);
  const double outside = region_mean(res.bam, [&](int x, int y) { return !in(x, y); });
  EXPECT_GT(inside, outside);
  for (double b : res.bam.vec()) EXPECT_GE(b, 0.0);
}

TEST(DctDetector, TooSmallImageRejected) {
  EXPECT_THROW(detectors::detect_dct(Grid<float>(31, 64)), Error);
}

// --------------------------------------------------------------------- BLK

namespace {

double blk_contrast(int shift, std::uint64_t seed) {
  synth::SynthSpec s;
  s.width = s.height = 256;
  s.op = shift > 0 ? synth::ForgeryOp::GridShiftRegion : synth::ForgeryOp::None;
  s.region = shift > 0 ? synth::Rect{64, 64, 128, 128} : synth::Rect{};
  s.strength = shift;
  s.hostChain = {synth::ChainStep::jpeg(75)};
  s.seed = seed;
  const auto r = synth::synth(s);
  const auto h = detectors::detect_blk(imaging::to_luma(r.image));
  auto in = [](int x, int y) { return x >= 64 && x < 192 && y >= 64 && y < 192; };
  return region_mean(h, in) - region_mean(h, [&](int x, int y) { return !in(x, y); });
}

}  // namespace

TEST(BlkDetector, ConstantImageGivesUniformZero) {
  const auto h = detectors::detect_blk(Grid<float>(96, 96, 50.0f));
  for (float v : h.vec()) ASSERT_EQ(v, 0.0f);
}

TEST(BlkDetector, MisalignedRegionScoresHigher) {
  EXPECT_GT(blk_contrast(4, 21), 0.0);
}

TEST(BlkDetector, PristineContrastBelowShiftedContrast) {
  EXPECT_LT(blk_contrast(0, 21), blk_contrast(4, 21));
}

TEST(BlkDetector, GridPhaseFollowsTranslation) {
  const auto img = imaging::to_luma(imaging::jpeg_roundtrip(textured(256, 30), 70));
  EXPECT_EQ(detectors::estimate_grid_phase(img).x, 0);
  Grid<float> moved(250, 250);
  for (int y = 0; y < 250; ++y)
    for (int x = 0; x < 250; ++x) moved(x, y) = img(x + 3, y + 5);
  const auto p = detectors::estimate_grid_phase(moved);
  EXPECT_EQ(p.x, 5);
  EXPECT_EQ(p.y, 3);
}

TEST(BlkDetector, TooSmallImageRejected) {
  try {
    detectors::detect_blk(Grid<float>(63, 100));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooSmall);
  }
}

// --------------------------------------------------------------------- ELA

TEST(ElaDetector, ConstantImageNearZero) {
  const auto h = detectors::detect_ela(Raster(64, 64, 3, 100.0f));
  for (float v : h.vec()) ASSERT_LE(v, 0.05f);
}

TEST(ElaDetector, OnceCompressedPasteStandsOut) {
  synth::SynthSpec s;
  s.width = s.height = 256;
  s.op = synth::ForgeryOp::Splice;
  s.region = {40, 80, 120, 100};
  s.hostChain = {synth::ChainStep::jpeg(75), synth::ChainStep::jpeg(75)};
  s.donorChain = {synth::ChainStep::jpeg(95)};
  s.seed = 13;
  const auto r = synth::synth(s);
  const auto h = detectors::detect_ela(r.image);
  const double in = region_mean(h, [&](int x, int y) { return r.mask.on(x, y); });
  const double out = region_mean(h, [&](int x, int y) { return !r.mask.on(x, y); });
  EXPECT_GT(in, out);
  for (float v : h.vec()) {
    ASSERT_GE(v, 0.0f);
    ASSERT_LE(v, 1.0f);
  }
}

// ------------------------------------------------------------- determinism

TEST(JpegDetectors, Deterministic) {
  const auto img = imaging::jpeg_roundtrip(textured(128, 40), 80);
  for (Algo a : {Algo::Blk, Algo::Dct, Algo::Ela}) {
    const auto h1 = run_detector(a, img), h2 = run_detector(a, img);
    EXPECT_EQ(h1.vec(), h2.vec()) << to_string(a);
    EXPECT_EQ(h1.width(), img.width());
    EXPECT_EQ(h1.height(), img.height());
  }
}
