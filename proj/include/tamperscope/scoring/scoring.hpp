#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <string>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/imaging/codec.hpp"
#include "tamperscope/imaging/morph.hpp"

namespace tamperscope::scoring {

inline constexpr int kDefaultKernel = 15;

/// Per-pixel scoring weights derived from a ground-truth mask.
struct ScoreWeights {
  Grid<std::uint8_t> weight;  // 1 scored, 0 in the no-score band
  GTMask manipulated;         // MR  = erode(m)
  GTMask pristine;            // NotMR = frame minus dilate(m)
  std::size_t mrCount = 0;
  std::size_t notMrCount = 0;

  std::size_t evaluated() const noexcept { return mrCount + notMrCount; }
};

inline ScoreWeights no_score_weights(const GTMask& m, int se = kDefaultKernel) {
  require(m.binary(), ErrorKind::Argument, "ground-truth mask must be binary");
  const GTMask dil = imaging::morph(m, imaging::MorphMode::Dilate, se);
  const GTMask ero = imaging::morph(m, imaging::MorphMode::Erode, se);
  ScoreWeights w;
  w.weight = Grid<std::uint8_t>(m.width(), m.height());
  w.manipulated = ero;
  w.pristine = GTMask(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool inMr = ero.vec()[i] != 0;
    const bool inNot = dil.vec()[i] == 0;
    w.pristine.vec()[i] = inNot ? GTMask::kOn : 0;
    w.weight.vec()[i] = (inMr || inNot) ? 1 : 0;
    w.mrCount += inMr;
    w.notMrCount += inNot;
  }
  return w;
}

namespace detail {

inline void check_shapes(const GTMask& m, const Grid<std::uint8_t>& pred,
                         const ScoreWeights& w) {
  require(m.same_shape(pred) && m.same_shape(w.weight), ErrorKind::Argument,
          "mask, prediction and weights must share dimensions");
}

}  // namespace detail

/// Grayscale weighted L1 over the evaluated region, on 0..255 predictions.
inline double gwl1(const GTMask& m, const Grid<std::uint8_t>& pred,
                   const ScoreWeights& w) {
  detail::check_shapes(m, pred, w);
  const std::size_t er = w.evaluated();
  require(er > 0, ErrorKind::UndefinedScore,
          "GWL1 undefined: no evaluated pixels");
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (w.weight.vec()[i])
      s += std::abs(static_cast<int>(m.vec()[i]) - static_cast<int>(pred.vec()[i])) / 255.0;
  return s / static_cast<double>(er);
}

inline double gwl1(const GTMask& m, const HeatMap& pred, const ScoreWeights& w) {
  return gwl1(m, imaging::quantize_scores(pred), w);
}

struct AucOptions {
  /// When MR is empty, treat TPR as 0 at every threshold instead of
  /// failing. Used by the pristine protocol, whose 10x10 region vanishes
  /// under erosion with the default kernel.
  bool emptyPositivesAsZeroTpr = false;
};

/// Area under the ROC curve from thresholding 0..255 predictions at every
/// distinct value (plus sentinels above the maximum and at 0), trapezoidal
/// accumulation. Only MR and NotMR pixels take part.
inline double auc(const GTMask& m, const Grid<std::uint8_t>& pred,
                  const ScoreWeights& w, const AucOptions& opt = {}) {
  detail::check_shapes(m, pred, w);
  require(w.notMrCount > 0, ErrorKind::UndefinedScore,
          "AUC undefined: no pristine (NotMR) pixels");
  require(w.mrCount > 0 || opt.emptyPositivesAsZeroTpr,
          ErrorKind::UndefinedScore, "AUC undefined: no manipulated (MR) pixels");
  std::array<std::size_t, 256> pos{}, neg{};
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (w.manipulated.vec()[i]) ++pos[pred.vec()[i]];
    else if (w.pristine.vec()[i]) ++neg[pred.vec()[i]];
  }
  const double P = static_cast<double>(w.mrCount);
  const double N = static_cast<double>(w.notMrCount);
  // Descending thresholds: 256 (nothing positive), each distinct value, 0.
  double tp = 0, fp = 0, prevTpr = 0, prevFpr = 0, area = 0;
  auto step = [&](double tpr, double fpr) {
    area += 0.5 * (tpr + prevTpr) * (fpr - prevFpr);
    prevTpr = tpr;
    prevFpr = fpr;
  };
  for (int v = 255; v >= 0; --v) {
    if (pos[v] == 0 && neg[v] == 0 && v != 0) continue;
    tp += pos[v];
    fp += neg[v];
    step(P > 0 ? tp / P : 0.0, fp / N);
  }
  return area;
}

inline double auc(const GTMask& m, const HeatMap& pred, const ScoreWeights& w,
                  const AucOptions& opt = {}) {
  return auc(m, imaging::quantize_scores(pred), w, opt);
}

inline constexpr int kPristineOffset = 16;
inline constexpr int kPristineSide = 10;

/// Fictitious 10x10 manipulated square at (16,16) for scoring clean images.
inline GTMask pristine_mask(int width, int height) {
  require(width >= 64 && height >= 64, ErrorKind::TooSmall,
          "pristine protocol needs at least a 64x64 image");
  GTMask m(width, height);
  for (int y = kPristineOffset; y < kPristineOffset + kPristineSide; ++y)
    for (int x = kPristineOffset; x < kPristineOffset + kPristineSide; ++x)
      m(x, y) = GTMask::kOn;
  return m;
}

struct ImageScore {
  double gwl1 = 0.0;
  double auc = 0.0;
};

/// Scores one prediction. Pristine rows use the fictitious region and the
/// zero-TPR convention when erosion empties it.
inline ImageScore score_image(const GTMask& m, const Grid<std::uint8_t>& pred,
                              int kernel = kDefaultKernel, bool pristine = false) {
  const auto w = no_score_weights(m, kernel);
  return {gwl1(m, pred, w), auc(m, pred, w, AucOptions{pristine})};
}

// --------------------------------------------------------- aggregation

struct ScoreRow {
  std::string id;
  std::string detector;
  double gwl1 = 0.0;
  double auc = 0.0;
};

struct AggregateRow {
  std::string detector;
  std::size_t count = 0;
  double gwl1Mean = 0.0, gwl1Std = 0.0;
  double aucMean = 0.0, aucStd = 0.0;
};

/// Mean and population standard deviation per detector, detectors in
/// lexicographic order. Sums are taken over rows sorted by value so the
/// result does not depend on input order.
inline std::vector<AggregateRow> aggregate(const std::vector<ScoreRow>& rows) {
  require(!rows.empty(), ErrorKind::Argument, "aggregate of no rows");
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by;
  for (const auto& r : rows) {
    by[r.detector].first.push_back(r.gwl1);
    by[r.detector].second.push_back(r.auc);
  }
  auto moments = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / v.size();
    std::vector<double> d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = (v[i] - mean) * (v[i] - mean);
    std::sort(d.begin(), d.end());
    double ss = 0.0;
    for (double x : d) ss += x;
    return std::pair{mean, std::sqrt(ss / v.size())};
  };
  std::vector<AggregateRow> out;
  for (const auto& [det, vals] : by) {
    AggregateRow a;
    a.detector = det;
    a.count = vals.first.size();
    std::tie(a.gwl1Mean, a.gwl1Std) = moments(vals.first);
    std::tie(a.aucMean, a.aucStd) = moments(vals.second);
    out.push_back(a);
  }
  return out;
}

}  // namespace tamperscope::scoring
