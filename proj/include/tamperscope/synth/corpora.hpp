#pragma once

#include "tamperscope/detectors.hpp"
#include "tamperscope/synth/forgery.hpp"

namespace tamperscope::synth {

/// Corpus template matched to the artefact each detector looks for.
inline SynthSpec matched_template(Algo algo) {
  SynthSpec s;
  switch (algo) {
    case Algo::Blk:
      // Aligned q75 host with a block of content moved off the 8x8 grid.
      s.base = BaseContent::Texture;
      s.op = ForgeryOp::GridShiftRegion;
      s.strength = 4.0;
      s.hostChain = {ChainStep::jpeg(75)};
      break;
    case Algo::Dct:
      // q95 splice in a q60 host, whole image re-saved at q95.
      s.base = BaseContent::Texture;
      s.op = ForgeryOp::Splice;
      s.hostChain = {ChainStep::jpeg(60)};
      s.donorChain = {ChainStep::jpeg(95)};
      s.post = {ChainStep::jpeg(95)};
      break;
    case Algo::Ela:
      // Host saved twice at q75; pasted content saved once.
      s.base = BaseContent::Texture;
      s.op = ForgeryOp::Splice;
      s.hostChain = {ChainStep::jpeg(75), ChainStep::jpeg(75)};
      s.donorChain = {ChainStep::jpeg(95)};
      break;
    case Algo::Cfa1:
    case Algo::Cfa2:
      // RGGB-demosaiced host with non-mosaiced content pasted in.
      s.base = BaseContent::DemosaicedRggb;
      s.donorBase = BaseContent::Texture;
      s.op = ForgeryOp::Splice;
      s.hostNoise = 0.0;
      break;
    case Algo::Noi1:
    case Algo::Noi2:
      s.base = BaseContent::Texture;
      s.op = ForgeryOp::NoiseRegion;
      s.strength = 5.0;
      s.hostNoise = 2.0;
      break;
    case Algo::Noi4:
      s.base = BaseContent::Texture;
      s.op = ForgeryOp::BlurRegion;
      s.strength = 2.0;
      s.hostNoise = 2.0;
      break;
  }
  return s;
}

}  // namespace tamperscope::synth
