// Measures mean pixel AUC and runtime of each detector on its matched
// synthetic corpus and on a pristine corpus.
//   corpus_probe [n] [size] [algo...]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "tamperscope/detectors.hpp"
#include "tamperscope/scoring/scoring.hpp"
#include "tamperscope/synth/corpora.hpp"

using namespace tamperscope;

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 10;
  const int size = argc > 2 ? std::atoi(argv[2]) : 512;
  std::vector<Algo> algos;
  for (int i = 3; i < argc; ++i)
    if (auto a = parse_algo(argv[i])) algos.push_back(*a);
  if (algos.empty()) algos.assign(kAllAlgos.begin(), kAllAlgos.end());

  for (Algo a : algos) {
    auto tmpl = synth::matched_template(a);
    tmpl.width = tmpl.height = size;
    double sumAuc = 0, sumPristine = 0, sumSparse = 0;
    double tSynth = 0, tDetect = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto t0 = std::chrono::steady_clock::now();
      auto item = synth::make_item(tmpl, i, 1234);
      auto pt = tmpl;
      pt.op = synth::ForgeryOp::None;
      auto clean = synth::make_item(pt, i, 99);
      auto t1 = std::chrono::steady_clock::now();
      auto h = run_detector(a, item.result.image);
      auto hp = run_detector(a, clean.result.image);
      auto t2 = std::chrono::steady_clock::now();
      tSynth += std::chrono::duration<double>(t1 - t0).count();
      tDetect += std::chrono::duration<double>(t2 - t1).count();
      sumAuc += scoring::score_image(item.result.mask, imaging::quantize_scores(h)).auc;
      auto pm = scoring::pristine_mask(size, size);
      sumPristine +=
          scoring::score_image(pm, imaging::quantize_scores(hp), 15, true).auc;
      std::size_t hi = 0;
      for (float v : hp.vec()) hi += v > 0.5f;
      sumSparse += static_cast<double>(hi) / hp.size();
    }
    std::printf("%-5s auc=%.3f pristineAuc=%.3f pristineHigh=%.3f synth=%.2fs detect=%.2fs\n",
                to_string(a), sumAuc / n, sumPristine / n, sumSparse / n,
                tSynth / n, tDetect / (2 * n));
    std::fflush(stdout);
  }
}
