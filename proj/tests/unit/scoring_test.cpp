#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support.hpp"
#include "tamperscope/scoring/scoring.hpp"

using namespace tamperscope;
using namespace testing_support;
namespace sc = tamperscope::scoring;

namespace {

using Pred = Grid<std::uint8_t>;

Pred as_pred(const GTMask& m) { return Pred(m.width(), m.height(), m.vec()); }

Pred inverted(const GTMask& m) {
  Pred p(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) p.vec()[i] = 255 - m.vec()[i];
  return p;
}

Pred random_pred(int w, int h, std::uint64_t seed, int levels = 256) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, levels - 1);
  Pred p(w, h);
  for (auto& v : p.vec()) v = static_cast<std::uint8_t>(u(rng) * 255 / std::max(1, levels - 1));
  return p;
}

// Direct enumeration: a pixel is in the dilation if any neighbour within the
// square is on, in the erosion if all of them are (outside the frame is off).
struct Sets {
  std::vector<bool> mr, notMr;
};

Sets brute_sets(const GTMask& m, int se) {
  const int r = se / 2;
  Sets s;
  s.mr.assign(m.size(), false);
  s.notMr.assign(m.size(), false);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      bool any = false, all = true;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = x + dx, yy = y + dy;
          const bool on = xx >= 0 && yy >= 0 && xx < m.width() && yy < m.height() && m.on(xx, yy);
          any = any || on;
          all = all && on;
        }
      const std::size_t i = static_cast<std::size_t>(y) * m.width() + x;
      s.mr[i] = all;
      s.notMr[i] = !any;
    }
  return s;
}

double brute_gwl1(const GTMask& m, const Pred& p, const Sets& s) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (s.mr[i] || s.notMr[i]) {
      sum += std::abs(double(m.vec()[i]) - double(p.vec()[i])) / 255.0;
      ++n;
    }
  return sum / n;
}

// Rank statistic: P(score_pos > score_neg) + P(tie) / 2.
double brute_auc(const Pred& p, const Sets& s) {
  std::vector<int> pos, neg;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (s.mr[i]) pos.push_back(p.vec()[i]);
    else if (s.notMr[i]) neg.push_back(p.vec()[i]);
  }
  double wins = 0.0;
  for (int a : pos)
    for (int b : neg) wins += a > b ? 1.0 : a == b ? 0.5 : 0.0;
  return wins / (double(pos.size()) * double(neg.size()));
}

}  // namespace

// --------------------------------------------------------------- no-score

TEST(NoScore, EmptyMaskScoresWholeFrameAsPristine) {
  const auto w = sc::no_score_weights(GTMask(40, 30));
  EXPECT_EQ(w.mrCount, 0u);
  EXPECT_EQ(w.notMrCount, 1200u);
  for (auto v : w.weight.vec()) ASSERT_EQ(v, 1);
}

TEST(NoScore, CenteredSquareRing) {
  const auto m = rect_mask(40, 40, 15, 15, 10, 10);
  const auto w = sc::no_score_weights(m, 5);
  EXPECT_EQ(w.mrCount, 36u);
  EXPECT_EQ(w.notMrCount, 40u * 40u - 14u * 14u);
  std::size_t band = 0;
  for (auto v : w.weight.vec()) band += v == 0;
  EXPECT_EQ(band, 14u * 14u - 6u * 6u);
}

TEST(NoScore, FullMaskLosesSevenPixelBorder) {
  GTMask m(50, 40, GTMask::kOn);
  const auto w = sc::no_score_weights(m);
  EXPECT_EQ(w.notMrCount, 0u);
  EXPECT_EQ(w.mrCount, (50u - 14u) * (40u - 14u));
  EXPECT_FALSE(w.manipulated.on(6, 20));
  EXPECT_TRUE(w.manipulated.on(7, 7));
}

TEST(NoScore, MatchesEnumeration) {
  for (int t = 0; t < 20; ++t) {
    const auto m = random_mask(24, 20, 0.6, 500 + t);
    for (int se : {1, 3, 5}) {
      const auto w = sc::no_score_weights(m, se);
      const auto s = brute_sets(m, se);
      for (std::size_t i = 0; i < m.size(); ++i) {
        ASSERT_EQ(w.manipulated.vec()[i] != 0, s.mr[i]);
        ASSERT_EQ(w.pristine.vec()[i] != 0, s.notMr[i]);
      }
    }
  }
}

// ------------------------------------------------------------------- GWL1

TEST(Gwl1, IdenticalPredictionIsZero) {
  const auto m = rect_mask(64, 64, 10, 10, 30, 30);
  EXPECT_EQ(sc::gwl1(m, as_pred(m), sc::no_score_weights(m)), 0.0);
}

TEST(Gwl1, InvertedPredictionIsOne) {
  const auto m = rect_mask(64, 64, 10, 10, 30, 30);
  EXPECT_DOUBLE_EQ(sc::gwl1(m, inverted(m), sc::no_score_weights(m)), 1.0);
}

TEST(Gwl1, ToyConstantPrediction) {
  const auto m = rect_mask(4, 4, 0, 0, 2, 4);
  const Pred p(4, 4, 128);
  // 8 manipulated pixels off by 127, 8 pristine ones off by 128.
  const double expected = (8 * 127.0 + 8 * 128.0) / (16 * 255.0);
  EXPECT_NEAR(sc::gwl1(m, p, sc::no_score_weights(m, 1)), expected, 1e-12);
}

TEST(Gwl1, IgnoresNoScoreBand) {
  const auto m = rect_mask(48, 48, 12, 12, 20, 20);
  const auto w = sc::no_score_weights(m, 5);
  auto p = random_pred(48, 48, 1);
  const double base = sc::gwl1(m, p, w);
  std::mt19937_64 rng(2);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!w.weight.vec()[i]) p.vec()[i] = static_cast<std::uint8_t>(rng());
  EXPECT_EQ(sc::gwl1(m, p, w), base);
}

TEST(Gwl1, UndefinedWithoutEvaluatedPixels) {
  GTMask m(8, 8, GTMask::kOn);
  try {
    sc::gwl1(m, Pred(8, 8), sc::no_score_weights(m));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndefinedScore);
  }
}

// -------------------------------------------------------------------- AUC

TEST(Auc, PerfectConstantAndInverse) {
  const auto m = rect_mask(64, 64, 8, 8, 40, 40);
  const auto w = sc::no_score_weights(m);
  EXPECT_DOUBLE_EQ(sc::auc(m, as_pred(m), w), 1.0);
  EXPECT_DOUBLE_EQ(sc::auc(m, Pred(64, 64, 77), w), 0.5);
  EXPECT_DOUBLE_EQ(sc::auc(m, inverted(m), w), 0.0);
}

TEST(Auc, InvariantUnderMonotoneTransform) {
  const auto m = rect_mask(48, 48, 10, 10, 24, 24);
  const auto w = sc::no_score_weights(m, 3);
  const auto p = random_pred(48, 48, 3, 40);
  Pred q = p;
  for (auto& v : q.vec()) v = static_cast<std::uint8_t>(v / 2 + 100);
  // Integer halving could merge adjacent levels; the 40 used ones are far apart.
  std::set<int> used(p.vec().begin(), p.vec().end()), mapped(q.vec().begin(), q.vec().end());
  ASSERT_EQ(used.size(), mapped.size());
  EXPECT_NEAR(sc::auc(m, p, w), sc::auc(m, q, w), 1e-12);
}

TEST(Auc, UndefinedWithoutPositivesUnlessZeroTpr) {
  const auto m = rect_mask(64, 64, 16, 16, 10, 10);
  const auto w = sc::no_score_weights(m);
  ASSERT_EQ(w.mrCount, 0u);
  EXPECT_THROW(sc::auc(m, Pred(64, 64), w), Error);
  EXPECT_EQ(sc::auc(m, Pred(64, 64), w, sc::AucOptions{true}), 0.0);
}

TEST(Scoring, MatchesBruteForceOnRandomPairs) {
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const auto m = random_mask(16, 16, 0.5, 1000 + t);
    const auto p = random_pred(16, 16, 2000 + t, 1 + t % 50);
    const int se = 1 + 2 * (t % 2);
    const auto w = sc::no_score_weights(m, se);
    const auto s = brute_sets(m, se);
    if (w.evaluated() > 0) EXPECT_NEAR(sc::gwl1(m, p, w), brute_gwl1(m, p, s), 1e-9);
    if (w.mrCount > 0 && w.notMrCount > 0) {
      EXPECT_NEAR(sc::auc(m, p, w), brute_auc(p, s), 1e-9) << "pair " << t;
      ++checked;
    }
  }
  EXPECT_GE(checked, 50);
}

// --------------------------------------------------------------- pristine

TEST(Pristine, MaskIsTenByTenAtSixteen) {
  const auto m = sc::pristine_mask(512, 512);
  EXPECT_EQ(m.count(), 100u);
  for (int y = 0; y < 512; ++y)
    for (int x = 0; x < 512; ++x)
      ASSERT_EQ(m.on(x, y), x >= 16 && x < 26 && y >= 16 && y < 26);
  EXPECT_EQ(sc::pristine_mask(512, 512).vec(), m.vec());
  EXPECT_THROW(sc::pristine_mask(32, 32), Error);
}

TEST(Pristine, ZeroHeatmapGivesMrOverEr) {
  const auto m = sc::pristine_mask(128, 128);
  const auto w = sc::no_score_weights(m);
  const auto s = sc::score_image(m, Pred(128, 128), sc::kDefaultKernel, true);
  EXPECT_DOUBLE_EQ(s.gwl1, double(w.mrCount) / double(w.evaluated()));
  EXPECT_EQ(s.auc, 0.0);
  // The 10x10 region vanishes under the 15x15 erosion.
  EXPECT_EQ(s.gwl1, 0.0);
}

// ------------------------------------------------------------ aggregation

TEST(Aggregate, MeanAndPopulationStd) {
  const auto a = sc::aggregate({{"a", "blk", 0.2, 0.5}, {"b", "blk", 0.4, 0.7}});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(a[0].gwl1Mean, 0.30, 1e-12);
  EXPECT_NEAR(a[0].gwl1Std, 0.10, 1e-12);
  EXPECT_NEAR(a[0].aucMean, 0.60, 1e-12);
  EXPECT_EQ(a[0].count, 2u);
}

TEST(Aggregate, SingleAndIdenticalRows) {
  const auto one = sc::aggregate({{"a", "ela", 0.25, 0.75}});
  EXPECT_EQ(one[0].gwl1Std, 0.0);
  const auto many = sc::aggregate(std::vector<sc::ScoreRow>(7, {"x", "ela", 0.25, 0.75}));
  EXPECT_EQ(many[0].gwl1Mean, 0.25);
  EXPECT_EQ(many[0].aucMean, 0.75);
  EXPECT_EQ(many[0].gwl1Std, 0.0);
}

TEST(Aggregate, OrderIndependentAndSortedByDetector) {
  std::vector<sc::ScoreRow> rows;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 40; ++i) rows.push_back({std::to_string(i), i % 3 ? "noi1" : "cfa2", u(rng), u(rng)});
  auto shuffled = rows;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = sc::aggregate(rows), b = sc::aggregate(shuffled);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].detector, "cfa2");
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].gwl1Mean, b[i].gwl1Mean);
    EXPECT_EQ(a[i].aucStd, b[i].aucStd);
  }
}
