#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/grid.hpp"
#include "tamperscope/core/raster.hpp"
#include "tamperscope/detectors/cfa.hpp"
#include "tamperscope/imaging/codec.hpp"
#include "tamperscope/imaging/filter.hpp"
#include "tamperscope/synth/texture.hpp"

namespace tamperscope::synth {

enum class BaseContent { Gradient, Texture, DemosaicedRggb, NoiseOverSmooth };
enum class ForgeryOp { None, Splice, CopyMove, BlurRegion, NoiseRegion, GridShiftRegion };

inline const char* to_string(BaseContent b) noexcept {
  switch (b) {
    case BaseContent::Gradient: return "gradient";
    case BaseContent::Texture: return "texture";
    case BaseContent::DemosaicedRggb: return "demosaiced-rggb";
    case BaseContent::NoiseOverSmooth: return "noise-over-smooth";
  }
  return "?";
}

inline const char* to_string(ForgeryOp o) noexcept {
  switch (o) {
    case ForgeryOp::None: return "none";
    case ForgeryOp::Splice: return "splice";
    case ForgeryOp::CopyMove: return "copy-move";
    case ForgeryOp::BlurRegion: return "blur-region";
    case ForgeryOp::NoiseRegion: return "noise-region";
    case ForgeryOp::GridShiftRegion: return "grid-shift-region";
  }
  return "?";
}

struct Rect {
  int x = 0, y = 0, w = 0, h = 0;

  bool empty() const noexcept { return w <= 0 || h <= 0; }
  bool inside(int width, int height) const noexcept {
    return x >= 0 && y >= 0 && w >= 1 && h >= 1 && x + w <= width &&
           y + h <= height;
  }
  bool overlaps(const Rect& o) const noexcept {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  long area() const noexcept { return static_cast<long>(w) * h; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// One global processing step: JPEG round trip or rescale.
struct ChainStep {
  enum class Kind { Jpeg, Resize } kind = Kind::Jpeg;
  int quality = 90;
  double factor = 1.0;

  static ChainStep jpeg(int q) { return {Kind::Jpeg, q, 1.0}; }
  static ChainStep resize(double f) { return {Kind::Resize, 90, f}; }
};

inline constexpr std::size_t kMaxChainLength = 4;

struct SynthSpec {
  int width = 512;
  int height = 512;
  int channels = 3;
  BaseContent base = BaseContent::Texture;
  ForgeryOp op = ForgeryOp::None;
  /// Forged region; an empty rect means "draw one" (corpus generation).
  Rect region;
  /// Copy-move source; drawn when empty.
  Rect source;
  /// Content pasted by a splice; defaults to the host's kind.
  std::optional<BaseContent> donorBase;
  /// Applied to the host before the forgery.
  std::vector<ChainStep> hostChain;
  /// Applied to splice donor content before pasting.
  std::vector<ChainStep> donorChain;
  /// Applied to the whole forged image; never changes the mask.
  std::vector<ChainStep> post;
  /// Op parameter: blur sigma, noise sigma, or grid shift in pixels.
  double strength = 0.0;
  /// Gaussian noise added to the whole host before the forgery.
  double hostNoise = 0.0;
  std::uint64_t seed = 0;
};

inline double default_strength(ForgeryOp op) noexcept {
  switch (op) {
    case ForgeryOp::BlurRegion: return 3.0;
    case ForgeryOp::NoiseRegion: return 5.0;
    case ForgeryOp::GridShiftRegion: return 4.0;
    default: return 0.0;
  }
}

/// Throws Argument errors naming the offending field.
inline void validate(const SynthSpec& s) {
  require(s.width >= 16 && s.height >= 16, ErrorKind::Argument,
          "width/height: frame must be at least 16x16");
  require(s.channels == 1 || s.channels == 3, ErrorKind::Argument,
          "channels: must be 1 or 3");
  require(s.base != BaseContent::DemosaicedRggb || s.channels == 3,
          ErrorKind::Argument, "base: demosaiced-rggb needs channels = 3");
  auto checkChain = [](const std::vector<ChainStep>& c, const char* name) {
    require(c.size() <= kMaxChainLength, ErrorKind::Argument,
            std::string(name) + ": at most 4 steps");
    for (const auto& st : c) {
      if (st.kind == ChainStep::Kind::Jpeg)
        require(st.quality >= 1 && st.quality <= 100, ErrorKind::Argument,
                std::string(name) + ": jpeg quality must be in 1..100");
      else
        require(st.factor > 0.0 && st.factor <= 4.0, ErrorKind::Argument,
                std::string(name) + ": resize factor must be in (0,4]");
    }
  };
  checkChain(s.hostChain, "hostChain");
  checkChain(s.donorChain, "donorChain");
  checkChain(s.post, "post");
  for (const auto& st : s.hostChain)
    require(st.kind == ChainStep::Kind::Jpeg, ErrorKind::Argument,
            "hostChain: only jpeg steps may precede the forgery");
  for (const auto& st : s.donorChain)
    require(st.kind == ChainStep::Kind::Jpeg, ErrorKind::Argument,
            "donorChain: only jpeg steps are allowed");
  if (s.op != ForgeryOp::None && !s.region.empty()) {
    require(s.region.inside(s.width, s.height), ErrorKind::Argument,
            "region: rectangle (" + std::to_string(s.region.x) + "," +
                std::to_string(s.region.y) + "," + std::to_string(s.region.w) +
                "," + std::to_string(s.region.h) + ") lies outside the " +
                std::to_string(s.width) + "x" + std::to_string(s.height) +
                " frame");
  }
  if (s.op == ForgeryOp::CopyMove && !s.source.empty()) {
    require(s.source.inside(s.width, s.height), ErrorKind::Argument,
            "source: rectangle lies outside the frame");
    require(s.source.w == s.region.w && s.source.h == s.region.h,
            ErrorKind::Argument, "source: must match the region size");
    require(!s.source.overlaps(s.region), ErrorKind::Argument,
            "source: must not overlap the region");
  }
  if (s.op == ForgeryOp::GridShiftRegion && !s.region.empty()) {
    const int d = static_cast<int>(std::lround(
        s.strength > 0 ? s.strength : default_strength(s.op)));
    require(s.region.x + s.region.w + d <= s.width &&
                s.region.y + s.region.h + d <= s.height,
            ErrorKind::Argument, "region: shifted source leaves the frame");
  }
}

// ------------------------------------------------------------- content

inline constexpr double kOpticalBlur = 1.0;

inline Raster make_base(BaseContent kind, int width, int height, int channels,
                        Rng& rng) {
  switch (kind) {
    case BaseContent::Gradient: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double ang = u(rng) * 2 * std::numbers::pi;
      const double ca = std::cos(ang), sa = std::sin(ang);
      const auto detail = fractal_noise(width, height, rng, 64, 4);
      Raster out(width, height, channels);
      const double diag = std::hypot(width, height);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          const double t = ((x - width / 2.0) * ca + (y - height / 2.0) * sa) / diag;
          const double v = 128.0 + 150.0 * t + 6.0 * detail(x, y);
          for (int c = 0; c < channels; ++c)
            out.at(x, y, c) = static_cast<float>(std::clamp(v + 10.0 * (c - 1) * t, 10.0, 245.0));
        }
      return out;
    }
    case BaseContent::Texture: {
      Raster out = dead_leaves(width, height, channels, rng);
      // Lens blur: real captures never carry perfectly sharp edges.
      for (int c = 0; c < channels; ++c)
        out.set_plane(c, imaging::gaussian_blur(out.plane(c), kOpticalBlur));
      const auto detail = fractal_noise(width, height, rng);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          for (int c = 0; c < channels; ++c)
            out.at(x, y, c) = std::clamp(out.at(x, y, c) + 10.0f * detail(x, y), 5.0f, 250.0f);
      return out;
    }
    case BaseContent::DemosaicedRggb: {
      Raster scene = make_base(BaseContent::Texture, width, height, 3, rng);
      std::normal_distribution<double> sensor(0.0, 2.0);
      for (float& v : scene.samples()) v = static_cast<float>(v + sensor(rng));
      return detectors::demosaic_bilinear(
          detectors::mosaic(scene, detectors::BayerPattern::RGGB),
          detectors::BayerPattern::RGGB);
    }
    case BaseContent::NoiseOverSmooth: {
      const auto smooth = fractal_noise(width, height, rng, 128, 16);
      std::normal_distribution<double> noise(0.0, 3.0);
      Raster out(width, height, channels);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          const double base = 128.0 + 40.0 * smooth(x, y);
          for (int c = 0; c < channels; ++c)
            out.at(x, y, c) = static_cast<float>(std::clamp(base + noise(rng), 5.0, 250.0));
        }
      return out;
    }
  }
  fail(ErrorKind::Argument, "unknown base content");
}

inline Raster resize_raster(const Raster& img, int w, int h) {
  if (img.channels() == 1)
    return Raster::from_plane(imaging::resize_bilinear(img.plane(0), w, h));
  return Raster::from_planes(imaging::resize_bilinear(img.plane(0), w, h),
                             imaging::resize_bilinear(img.plane(1), w, h),
                             imaging::resize_bilinear(img.plane(2), w, h));
}

inline Raster apply_step(const Raster& img, const ChainStep& step) {
  if (step.kind == ChainStep::Kind::Jpeg)
    return imaging::jpeg_roundtrip(img, step.quality);
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * step.factor)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * step.factor)));
  return resize_raster(img, w, h).quantized();
}

inline Raster apply_chain(Raster img, const std::vector<ChainStep>& chain) {
  for (const auto& st : chain) img = apply_step(img, st);
  return img;
}

struct SynthResult {
  Raster image;
  GTMask mask;
  Rect region;  // empty for pristine items
  Rect source;  // copy-move only
};

namespace detail {

inline void copy_rect(const Raster& from, Raster& to, const Rect& dst,
                      int offX = 0, int offY = 0) {
  for (int y = dst.y; y < dst.y + dst.h; ++y)
    for (int x = dst.x; x < dst.x + dst.w; ++x)
      for (int c = 0; c < to.channels(); ++c)
        to.at(x, y, c) = from.at(x + offX, y + offY, c);
}

}  // namespace detail

/// Deterministic forgery for a fully specified spec (region must be set
/// unless op is None; copy-move needs its source).
inline SynthResult synth(const SynthSpec& spec) {
  validate(spec);
  require(spec.op == ForgeryOp::None || !spec.region.empty(),
          ErrorKind::Argument, "region: required for op " +
                                   std::string(to_string(spec.op)));
  Rng rng(mix_seed(spec.seed));
  Raster host = make_base(spec.base, spec.width, spec.height, spec.channels, rng);
  if (spec.hostNoise > 0.0) {
    std::normal_distribution<double> n(0.0, spec.hostNoise);
    for (float& v : host.samples()) v = static_cast<float>(v + n(rng));
  }
  host = apply_chain(host.quantized(), spec.hostChain);

  SynthResult out;
  out.mask = GTMask(spec.width, spec.height);
  Raster img = host;
  const Rect& r = spec.region;
  const double strength =
      spec.strength > 0.0 ? spec.strength : default_strength(spec.op);
  switch (spec.op) {
    case ForgeryOp::None: break;
    case ForgeryOp::Splice: {
      Rng donorRng(mix_seed(spec.seed ^ 0xD0D0D0D0D0D0D0D0ull));
      Raster donor = make_base(spec.donorBase.value_or(spec.base), spec.width,
                               spec.height, spec.channels, donorRng);
      if (spec.hostNoise > 0.0) {
        std::normal_distribution<double> n(0.0, spec.hostNoise);
        for (float& v : donor.samples()) v = static_cast<float>(v + n(donorRng));
      }
      donor = apply_chain(donor.quantized(), spec.donorChain);
      detail::copy_rect(donor, img, r);
      break;
    }
    case ForgeryOp::CopyMove: {
      require(!spec.source.empty(), ErrorKind::Argument,
              "source: required for copy-move");
      detail::copy_rect(host, img, r, spec.source.x - r.x, spec.source.y - r.y);
      out.source = spec.source;
      break;
    }
    case ForgeryOp::BlurRegion: {
      for (int c = 0; c < img.channels(); ++c) {
        const auto blurred = imaging::gaussian_blur(host.plane(c), strength);
        for (int y = r.y; y < r.y + r.h; ++y)
          for (int x = r.x; x < r.x + r.w; ++x) img.at(x, y, c) = blurred(x, y);
      }
      break;
    }
    case ForgeryOp::NoiseRegion: {
      std::normal_distribution<double> n(0.0, strength);
      for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x)
          for (int c = 0; c < img.channels(); ++c)
            img.at(x, y, c) = static_cast<float>(img.at(x, y, c) + n(rng));
      break;
    }
    case ForgeryOp::GridShiftRegion: {
      const int d = static_cast<int>(std::lround(strength));
      detail::copy_rect(host, img, r, d, d);
      break;
    }
  }
  if (spec.op != ForgeryOp::None) {
    out.region = r;
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x) out.mask(x, y) = GTMask::kOn;
  }

  img = img.quantized();
  for (const auto& st : spec.post) {
    img = apply_step(img, st);
    if (st.kind == ChainStep::Kind::Resize)
      out.mask = GTMask(imaging::resize_nearest<std::uint8_t>(out.mask, img.width(),
                                                              img.height()));
  }
  out.image = std::move(img);
  return out;
}

// -------------------------------------------------------------- corpus

inline constexpr double kMinForgedFraction = 0.02;
inline constexpr double kMaxForgedFraction = 0.15;

/// Draws a region covering a fraction of the frame in
/// [kMinForgedFraction, kMaxForgedFraction] (and a disjoint copy-move
/// source when needed).
inline void draw_geometry(SynthSpec& s, Rng& rng) {
  std::uniform_real_distribution<double> frac(kMinForgedFraction, kMaxForgedFraction);
  std::uniform_real_distribution<double> logAspect(std::log(0.5), std::log(2.0));
  const double frame = static_cast<double>(s.width) * s.height;
  const int margin = s.op == ForgeryOp::GridShiftRegion
                         ? static_cast<int>(std::lround(
                               s.strength > 0 ? s.strength : default_strength(s.op)))
                         : 0;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double area = frac(rng) * frame;
    const double aspect = std::exp(logAspect(rng));
    const int w = static_cast<int>(std::lround(std::sqrt(area * aspect)));
    const int h = static_cast<int>(std::lround(area / std::max(w, 1)));
    const double f = static_cast<double>(w) * h / frame;
    if (w < 1 || h < 1 || w + margin > s.width || h + margin > s.height ||
        f < kMinForgedFraction || f > kMaxForgedFraction)
      continue;
    std::uniform_int_distribution<int> px(0, s.width - w - margin);
    std::uniform_int_distribution<int> py(0, s.height - h - margin);
    Rect r{px(rng), py(rng), w, h};
    if (s.op == ForgeryOp::CopyMove) {
      bool placed = false;
      for (int k = 0; k < 1000 && !placed; ++k) {
        Rect src{px(rng), py(rng), w, h};
        if (!src.overlaps(r)) s.source = src, placed = true;
      }
      if (!placed) continue;
    }
    s.region = r;
    return;
  }
  fail(ErrorKind::Argument, "could not place a forged region in the frame");
}

struct CorpusItem {
  std::string id;
  SynthSpec spec;  // fully resolved
  SynthResult result;
  bool pristine() const noexcept { return spec.op == ForgeryOp::None; }
  double forged_fraction() const noexcept {
    return static_cast<double>(result.mask.count()) / result.mask.size();
  }
};

inline std::string item_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img%05zu", index);
  return buf;
}

/// Resolves the template for one corpus item: derived seed seed ^ index,
/// fresh geometry when the template leaves it open.
inline SynthSpec resolve_item(const SynthSpec& tmpl, std::size_t index,
                              std::uint64_t seed) {
  SynthSpec s = tmpl;
  s.seed = seed ^ static_cast<std::uint64_t>(index);
  if (s.op != ForgeryOp::None && s.region.empty()) {
    Rng rng(mix_seed(s.seed ^ 0x5EEDF00Dull));
    draw_geometry(s, rng);
  }
  return s;
}

inline CorpusItem make_item(const SynthSpec& tmpl, std::size_t index,
                            std::uint64_t seed) {
  CorpusItem it;
  it.id = item_id(index);
  it.spec = resolve_item(tmpl, index, seed);
  it.result = synth(it.spec);
  return it;
}

inline std::vector<CorpusItem> corpus(const SynthSpec& tmpl, std::size_t n,
                                      std::uint64_t seed) {
  require(n >= 1, ErrorKind::Argument, "n: corpus size must be >= 1");
  validate(tmpl);
  std::vector<CorpusItem> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(make_item(tmpl, i, seed));
  return out;
}

}  // namespace tamperscope::synth
