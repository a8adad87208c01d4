#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/raster.hpp"
#include "tamperscope/imaging/wavelet.hpp"
#include "tamperscope/synth/texture.hpp"

namespace tamperscope::aen {

enum class PatchClass { Pristine, Manipulated };

inline const char* to_string(PatchClass c) noexcept {
  return c == PatchClass::Manipulated ? "manipulated" : "non-manipulated";
}

inline constexpr int kDefaultPatchSide = 64;

struct Patch {
  Raster pixels;
  PatchClass label = PatchClass::Pristine;
  int x = 0, y = 0;  // top-left corner in the source image
};

using FeatureVec = std::vector<double>;

struct LossWeights {
  double w0 = 1.0, w1 = 1.0, w2 = 1.0;

  void validate() const {
    require(w0 >= 0 && w1 >= 0 && w2 >= 0, ErrorKind::Argument,
            "loss weights must be non-negative");
    require(w0 > 0 || w1 > 0 || w2 > 0, ErrorKind::Argument,
            "loss weights must not all be zero");
  }
};

inline constexpr double kSmapeEpsilon = 1e-8;

/// Mean of |x - y| / (|x| + |y| + eps); lies in [0, 1].
template <class T>
double smape(std::span<const T> x, std::span<const T> y) {
  require(x.size() == y.size(), ErrorKind::Argument,
          "smape: length mismatch (" + std::to_string(x.size()) + " vs " +
              std::to_string(y.size()) + ")");
  require(!x.empty(), ErrorKind::Argument, "smape: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i], b = y[i];
    s += std::abs(a - b) / (std::abs(a) + std::abs(b) + kSmapeEpsilon);
  }
  return s / static_cast<double>(x.size());
}

inline double smape(const FeatureVec& x, const FeatureVec& y) {
  return smape<double>(std::span<const double>(x), std::span<const double>(y));
}

inline double smape(const Raster& x, const Raster& y) {
  require(x.width() == y.width() && x.height() == y.height() &&
              x.channels() == y.channels(),
          ErrorKind::Argument, "smape: patch shapes differ");
  return smape<float>(std::span<const float>(x.samples()),
                      std::span<const float>(y.samples()));
}

template <class F>
concept FeatureExtractor = requires(const F& f, const Raster& r) {
  { f(r) } -> std::convertible_to<FeatureVec>;
};

/// Deterministic stand-in embedding. Per channel: mean, variance, then the
/// mean squared LH, HL and HH coefficients of three Haar levels (11 values).
inline FeatureVec reference_features(const Raster& patch) {
  constexpr int kLevels = 3;
  FeatureVec out;
  out.reserve(static_cast<std::size_t>(patch.channels()) * (2 + 3 * kLevels));
  for (int c = 0; c < patch.channels(); ++c) {
    const Grid<float> plane = patch.plane(c);
    double s = 0.0;
    for (float v : plane.vec()) s += v;
    const double mean = s / static_cast<double>(plane.size());
    double ss = 0.0;
    for (float v : plane.vec()) ss += (v - mean) * (v - mean);
    out.push_back(mean);
    out.push_back(ss / static_cast<double>(plane.size()));
    Grid<float> ll = plane;
    for (int level = 0; level < kLevels; ++level) {
      if (ll.width() < 2 || ll.height() < 2) {
        out.insert(out.end(), 3, 0.0);
        continue;
      }
      const auto h = imaging::haar2d(ll);
      for (const Grid<float>* band : {&h.lh, &h.hl, &h.hh}) {
        double e = 0.0;
        for (float v : band->vec()) e += static_cast<double>(v) * v;
        out.push_back(e / static_cast<double>(band->size()));
      }
      ll = h.ll;
    }
  }
  return out;
}

struct ReferenceExtractor {
  FeatureVec operator()(const Raster& r) const { return reference_features(r); }
};

/// w0 D(a, aHat) + w1 D(f(aHat), f(p)) - w2 D(f(aHat), f(n)). Unbounded
/// below; no margin or clamp is applied.
template <FeatureExtractor F = ReferenceExtractor>
double loss(const Patch& a, const Raster& aHat, const Patch& p, const Patch& n,
            const LossWeights& w, const F& f = {}) {
  w.validate();
  require(p.label == a.label, ErrorKind::Argument,
          "loss: positive must share the anchor's class");
  require(n.label != a.label, ErrorKind::Argument,
          "loss: negative must have the opposite class");
  const auto& ap = a.pixels;
  for (const Raster* r : {&aHat, &p.pixels, &n.pixels})
    require(r->width() == ap.width() && r->height() == ap.height() &&
                r->channels() == ap.channels(),
            ErrorKind::Argument, "loss: patch shapes differ");
  const FeatureVec fh = f(aHat);
  return w.w0 * smape(ap, aHat) + w.w1 * smape(fh, FeatureVec(f(p.pixels))) -
         w.w2 * smape(fh, FeatureVec(f(n.pixels)));
}

// ------------------------------------------------------------- mining

struct Triplet {
  std::size_t anchor = 0, positive = 0, negative = 0;  // indices into patches
};

struct TripletBatch {
  std::vector<Patch> patches;  // labelled tiles; mixed tiles are dropped
  std::vector<Triplet> triplets;
};

/// Cuts the image into non-overlapping side x side tiles and labels them:
/// manipulated when at least half the pixels are masked, pristine when none
/// are, otherwise dropped.
inline std::vector<Patch> label_patches(const Raster& img, const GTMask& m,
                                        int side) {
  require(side >= 1, ErrorKind::Argument, "patch side must be >= 1");
  require(img.width() == m.width() && img.height() == m.height(),
          ErrorKind::Argument, "image and mask dimensions differ");
  std::vector<Patch> out;
  const std::size_t area = static_cast<std::size_t>(side) * side;
  for (int y = 0; y + side <= img.height(); y += side)
    for (int x = 0; x + side <= img.width(); x += side) {
      std::size_t on = 0;
      for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i) on += m.on(x + i, y + j);
      PatchClass label;
      if (on == 0) label = PatchClass::Pristine;
      else if (2 * on >= area) label = PatchClass::Manipulated;
      else continue;
      Raster px(side, side, img.channels());
      for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i)
          for (int c = 0; c < img.channels(); ++c)
            px.at(i, j, c) = img.at(x + i, y + j, c);
      out.push_back({std::move(px), label, x, y});
    }
  return out;
}

/// Draws `count` triplets uniformly from the labelled tiles. Anchors
/// alternate between classes, manipulated first. The positive differs from
/// the anchor whenever its class has more than one tile.
inline TripletBatch mine_triplets(const Raster& img, const GTMask& m, int side,
                                  std::size_t count, std::uint64_t seed) {
  require(count >= 1, ErrorKind::Argument, "triplet count must be >= 1");
  TripletBatch b;
  b.patches = label_patches(img, m, side);
  std::vector<std::size_t> pools[2];
  for (std::size_t i = 0; i < b.patches.size(); ++i)
    pools[b.patches[i].label == PatchClass::Manipulated].push_back(i);
  require(!pools[0].empty() && !pools[1].empty(), ErrorKind::NoTriplets,
          "mask yields " + std::to_string(pools[1].size()) + " manipulated and " +
              std::to_string(pools[0].size()) + " pristine patches; need both");
  synth::Rng rng(synth::mix_seed(seed));
  auto pick = [&](const std::vector<std::size_t>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };
  for (std::size_t t = 0; t < count; ++t) {
    const int cls = t % 2 == 0 ? 1 : 0;
    const auto& same = pools[cls];
    Triplet tr;
    tr.anchor = pick(same);
    if (same.size() > 1) {
      std::uniform_int_distribution<std::size_t> d(0, same.size() - 2);
      std::size_t k = d(rng);
      if (same[k] == tr.anchor) k = same.size() - 1;
      tr.positive = same[k];
    } else {
      tr.positive = tr.anchor;
    }
    tr.negative = pick(pools[1 - cls]);
    b.triplets.push_back(tr);
  }
  return b;
}

/// Mean loss over a batch with identity reconstruction (aHat = a).
template <FeatureExtractor F = ReferenceExtractor>
double batch_loss(const TripletBatch& b, const LossWeights& w, const F& f = {}) {
  require(!b.triplets.empty(), ErrorKind::NoTriplets, "empty triplet batch");
  double s = 0.0;
  for (const auto& t : b.triplets) {
    const Patch& a = b.patches[t.anchor];
    s += loss(a, a.pixels, b.patches[t.positive], b.patches[t.negative], w, f);
  }
  return s / static_cast<double>(b.triplets.size());
}

}  // namespace tamperscope::aen
