#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "tamperscope/core/error.hpp"
#include "tamperscope/core/raster.hpp"
#include "tamperscope/detectors/blk.hpp"
#include "tamperscope/detectors/cfa.hpp"
#include "tamperscope/detectors/dct.hpp"
#include "tamperscope/detectors/ela.hpp"
#include "tamperscope/detectors/noise.hpp"
#include "tamperscope/imaging/color.hpp"

namespace tamperscope {

enum class Algo { Blk, Dct, Ela, Cfa1, Cfa2, Noi1, Noi2, Noi4 };

inline constexpr std::array<Algo, 8> kAllAlgos = {
    Algo::Blk,  Algo::Dct,  Algo::Ela,  Algo::Cfa1,
    Algo::Cfa2, Algo::Noi1, Algo::Noi2, Algo::Noi4};

inline const char* to_string(Algo a) noexcept {
  switch (a) {
    case Algo::Blk: return "blk";
    case Algo::Dct: return "dct";
    case Algo::Ela: return "ela";
    case Algo::Cfa1: return "cfa1";
    case Algo::Cfa2: return "cfa2";
    case Algo::Noi1: return "noi1";
    case Algo::Noi2: return "noi2";
    case Algo::Noi4: return "noi4";
  }
  return "?";
}

inline std::optional<Algo> parse_algo(std::string_view s) {
  for (Algo a : kAllAlgos)
    if (s == to_string(a)) return a;
  return std::nullopt;
}

struct DetectorParams {
  detectors::BlkConfig blk;
  int elaQuality = detectors::kDefaultElaQuality;
  int cfa1Block = 16;
  int noi1Block = detectors::kDefaultNoi1Block;
};

/// Runs one detector. Luminance detectors convert colour input first; the
/// CFA detectors reject grayscale input.
inline HeatMap run_detector(Algo algo, const Raster& img,
                            const DetectorParams& p = {}) {
  using namespace detectors;
  switch (algo) {
    case Algo::Blk: return detect_blk(imaging::to_luma(img), p.blk);
    case Algo::Dct: return detect_dct(imaging::to_luma(img));
    case Algo::Ela: return detect_ela(img, p.elaQuality);
    case Algo::Cfa1: return detect_cfa1(img, p.cfa1Block);
    case Algo::Cfa2: return detect_cfa2(img);
    case Algo::Noi1: return detect_noi1(imaging::to_luma(img), p.noi1Block);
    case Algo::Noi2: return detect_noi2(imaging::to_luma(img));
    case Algo::Noi4: return detect_noi4(imaging::to_luma(img));
  }
  fail(ErrorKind::Argument, "unknown detector");
}

}  // namespace tamperscope
