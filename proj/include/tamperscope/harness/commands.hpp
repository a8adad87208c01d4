#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "tamperscope/aen/loss.hpp"
#include "tamperscope/core/error.hpp"
#include "tamperscope/detectors.hpp"
#include "tamperscope/harness/index.hpp"
#include "tamperscope/harness/spec_json.hpp"
#include "tamperscope/imaging/codec.hpp"
#include "tamperscope/scoring/scoring.hpp"
#include "tamperscope/synth/forgery.hpp"

namespace tamperscope::harness {

inline constexpr const char* kToolName = "tamperscope";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitPartial = 1, kExitInvalid = 2 };

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is handled
/// by exactly one call, so results stored by index do not depend on
/// scheduling.
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(n);
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Rounds to 6 significant digits, the precision used in reports.
inline double sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

/// Aggregate percentages are reported to 2 decimals.
inline double round2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::strtod(buf, nullptr);
}

inline void write_json_atomic(const fs::path& path, const json& j) {
  imaging::write_file_atomic(path, j.dump(2) + "\n");
}

// ------------------------------------------------------------- detect

struct DetectOptions {
  std::vector<Algo> algos;
  DetectorParams params;
  fs::path out;
  int jobs = 1;
};

struct DetectIssue {
  std::string imageId;
  std::string detector;  // empty when the image itself was unusable
  std::string reason;
};

struct DetectSummary {
  std::size_t heatmaps = 0;
  std::vector<DetectIssue> issues;
  int exitCode() const { return issues.empty() ? kExitOk : kExitPartial; }
};

inline fs::path heatmap_path(const fs::path& dir, Algo a, const std::string& id) {
  return dir / to_string(a) / (id + ".png");
}

inline json params_json(const DetectorParams& p) {
  return {{"blk", {{"poolRadius", p.blk.poolRadius}}},
          {"ela", {{"quality", p.elaQuality}}},
          {"cfa1", {{"blockSize", p.cfa1Block}}},
          {"noi1", {{"blockSize", p.noi1Block}}}};
}

/// One 8-bit PNG heatmap per (image, detector) under out/<algo>/<id>.png,
/// plus out/manifest.json. Undecodable images and per-detector failures are
/// listed and skipped.
inline DetectSummary cmd_detect(const DatasetIndex& index, const DetectOptions& opt) {
  require(!index.rows.empty(), ErrorKind::Argument, "index has no rows");
  require(!opt.algos.empty(), ErrorKind::Argument, "no detector selected");
  require(opt.jobs >= 1, ErrorKind::Argument, "--jobs must be >= 1");
  std::error_code ec;
  for (Algo a : opt.algos) {
    fs::create_directories(opt.out / to_string(a), ec);
    require(!ec, ErrorKind::Io, "cannot create output directory '" +
                                    (opt.out / to_string(a)).string() + "': " +
                                    ec.message());
  }
  const auto rows = sorted_rows(index);
  struct PerImage {
    std::vector<DetectIssue> issues;
    std::map<std::string, double> millis;
    std::size_t written = 0;
  };
  std::vector<PerImage> results(rows.size());
  parallel_for(rows.size(), opt.jobs, [&](std::size_t i) {
    const auto& row = rows[i];
    PerImage& r = results[i];
    Raster img;
    try {
      img = imaging::load_image(index.resolve(row.imagePath));
    } catch (const Error& e) {
      r.issues.push_back({row.imageId, "", e.what()});
      return;
    }
    for (Algo a : opt.algos) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const HeatMap h = run_detector(a, img, opt.params);
        imaging::save_png(heatmap_path(opt.out, a, row.imageId),
                          imaging::quantize_scores(h));
        ++r.written;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Io) throw;
        r.issues.push_back({row.imageId, to_string(a), e.what()});
      }
      r.millis[to_string(a)] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
    }
  });

  DetectSummary sum;
  json images = json::array(), skipped = json::array(), algos = json::array();
  for (Algo a : opt.algos) algos.push_back(to_string(a));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sum.heatmaps += results[i].written;
    json t = json::object();
    for (const auto& [k, v] : results[i].millis) t[k] = sig6(v);
    images.push_back({{"id", rows[i].imageId}, {"millis", t}});
    for (auto& is : results[i].issues) {
      skipped.push_back({{"id", is.imageId}, {"detector", is.detector}, {"reason", is.reason}});
      sum.issues.push_back(std::move(is));
    }
  }
  write_json_atomic(opt.out / "manifest.json",
                    {{"tool", kToolName},
                     {"version", kToolVersion},
                     {"detectors", algos},
                     {"params", params_json(opt.params)},
                     {"jobs", opt.jobs},
                     {"images", images},
                     {"skipped", skipped}});
  return sum;
}

// -------------------------------------------------------------- score

struct ScoreOptions {
  fs::path pred;
  int kernel = scoring::kDefaultKernel;
  bool pristine = false;
  int jobs = 1;
};

struct ScoreOutcome {
  json report;
  std::size_t errors = 0;
  int exitCode() const { return errors == 0 ? kExitOk : kExitPartial; }
};

inline Grid<std::uint8_t> load_heatmap_u8(const fs::path& path) {
  const Raster r = imaging::load_image(path);
  require(r.channels() == 1, ErrorKind::UnsupportedFormat,
          "heatmap must be single-channel: " + path.string());
  Grid<std::uint8_t> g(r.width(), r.height());
  for (std::size_t i = 0; i < g.size(); ++i)
    g.vec()[i] = static_cast<std::uint8_t>(r.samples()[i]);
  return g;
}

/// Detectors present under the prediction directory, in name order.
inline std::vector<std::string> detectors_in(const fs::path& pred) {
  require(fs::is_directory(pred), ErrorKind::Argument,
          "prediction directory not found: " + pred.string());
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(pred))
    if (e.is_directory() && parse_algo(e.path().filename().string()))
      out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  require(!out.empty(), ErrorKind::Argument,
          "no detector subdirectories under " + pred.string());
  return out;
}

/// Scores every (row, detector) pair. Pristine rows need the pristine
/// protocol; they are scored against the fictitious 10x10 region.
inline ScoreOutcome build_report(const DatasetIndex& index, const ScoreOptions& opt) {
  require(!index.rows.empty(), ErrorKind::Argument, "index has no rows");
  require(opt.kernel >= 1 && opt.kernel % 2 == 1 && opt.kernel <= 255,
          ErrorKind::Argument, "--kernel must be odd and in 1..255");
  const auto dets = detectors_in(opt.pred);
  const auto rows = sorted_rows(index);

  struct Cell {
    std::optional<scoring::ImageScore> score;
    std::string error;
  };
  std::vector<Cell> cells(rows.size() * dets.size());
  parallel_for(rows.size(), opt.jobs, [&](std::size_t i) {
    const auto& row = rows[i];
    std::optional<GTMask> mask;
    std::string maskError;
    try {
      if (row.pristine) {
        require(opt.pristine, ErrorKind::Argument,
                "pristine row; score with --pristine");
      } else {
        require(!row.maskPath.empty(), ErrorKind::Argument, "row has no mask");
        mask = imaging::load_mask(index.resolve(row.maskPath));
      }
    } catch (const Error& e) {
      maskError = e.what();
    }
    for (std::size_t d = 0; d < dets.size(); ++d) {
      Cell& c = cells[i * dets.size() + d];
      if (!maskError.empty()) {
        c.error = maskError;
        continue;
      }
      try {
        const fs::path hp = opt.pred / dets[d] / (row.imageId + ".png");
        require(fs::exists(hp), ErrorKind::Io, "missing heatmap " + hp.string());
        const auto pred = load_heatmap_u8(hp);
        const GTMask m = row.pristine ? scoring::pristine_mask(pred.width(), pred.height())
                                      : *mask;
        c.score = scoring::score_image(m, pred, opt.kernel, row.pristine);
      } catch (const Error& e) {
        c.error = e.what();
      }
    }
  });

  ScoreOutcome out;
  json perImage = json::array(), errors = json::array();
  std::vector<scoring::ScoreRow> scored;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t d = 0; d < dets.size(); ++d) {
      const Cell& c = cells[i * dets.size() + d];
      if (c.score) {
        perImage.push_back({{"id", rows[i].imageId},
                            {"detector", dets[d]},
                            {"gwl1", sig6(100.0 * c.score->gwl1)},
                            {"auc", sig6(100.0 * c.score->auc)}});
        scored.push_back({rows[i].imageId, dets[d], c.score->gwl1, c.score->auc});
      } else {
        errors.push_back({{"id", rows[i].imageId}, {"detector", dets[d]}, {"error", c.error}});
        ++out.errors;
      }
    }
  json agg = json::array();
  if (!scored.empty())
    for (const auto& a : scoring::aggregate(scored))
      agg.push_back({{"detector", a.detector},
                     {"count", a.count},
                     {"gwl1Mean", round2(100.0 * a.gwl1Mean)},
                     {"gwl1Std", round2(100.0 * a.gwl1Std)},
                     {"aucMean", round2(100.0 * a.aucMean)},
                     {"aucStd", round2(100.0 * a.aucStd)}});
  json params = {{"kernel", opt.kernel},
                 {"pristine", opt.pristine},
                 {"detectors", dets},
                 {"images", rows.size()},
                 {"units", "percent"}};
  json body = {{"params", params}, {"perImage", perImage}, {"aggregate", agg},
               {"errors", errors}};
  out.report = {{"runId", hex64(fnv1a(body.dump()))}};
  out.report.update(body);
  return out;
}

inline ScoreOutcome cmd_score(const DatasetIndex& index, const ScoreOptions& opt,
                              const fs::path& reportPath) {
  auto out = build_report(index, opt);
  write_json_atomic(reportPath, out.report);
  return out;
}

// -------------------------------------------------------------- synth

struct SynthSummary {
  std::size_t images = 0, masks = 0;
  std::string indexDigest;
};

/// Writes images/<id>.png (or .jpg when the post chain ends in a JPEG
/// step), masks/<id>.png for forged items, and index.csv.
inline SynthSummary cmd_synth(const synth::SynthSpec& tmpl, std::size_t n,
                              std::uint64_t seed, const fs::path& out) {
  require(n >= 1, ErrorKind::Argument, "--n must be >= 1");
  synth::validate(tmpl);
  std::error_code ec;
  fs::create_directories(out / "images", ec);
  if (!ec) fs::create_directories(out / "masks", ec);
  require(!ec, ErrorKind::Io, "cannot create output directory '" + out.string() +
                                  "': " + ec.message());
  const bool jpegOut = !tmpl.post.empty() &&
                       tmpl.post.back().kind == synth::ChainStep::Kind::Jpeg;
  SynthSummary sum;
  std::vector<IndexRow> rows;
  std::uint64_t contentHash = fnv1a("");
  auto emit = [&](const std::string& rel, const imaging::Bytes& bytes) {
    imaging::write_file_atomic(out / rel, bytes);
    contentHash = fnv1a(rel, contentHash);
    contentHash = fnv1a(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()),
                        contentHash);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = synth::item_id(i);
    synth::SynthSpec s = synth::resolve_item(tmpl, i, seed);
    IndexRow row{id, "", "", s.op == synth::ForgeryOp::None};
    int finalQuality = 0;
    if (jpegOut) {
      // Stop before the final JPEG step and let its bytes be the file.
      finalQuality = s.post.back().quality;
      s.post.pop_back();
    }
    const auto r = synth::synth(s);
    row.imagePath = "images/" + id + (jpegOut ? ".jpg" : ".png");
    emit(row.imagePath, jpegOut ? imaging::encode_jpeg(r.image, finalQuality)
                                : imaging::encode_png(r.image));
    if (!row.pristine) {
      row.maskPath = "masks/" + id + ".png";
      emit(row.maskPath, imaging::encode_png(r.mask));
    }
    ++sum.images;
    sum.masks += !row.pristine;
    rows.push_back(std::move(row));
  }
  const std::string text = format_index(rows);
  imaging::write_file_atomic(out / "index.csv", text);
  // Covers the index and every written file, so any content change shows.
  sum.indexDigest = hex64(fnv1a(text, contentHash));
  return sum;
}

// ----------------------------------------------------------- aen-loss

struct AenOptions {
  aen::LossWeights weights;
  int patchSide = aen::kDefaultPatchSide;
  std::size_t triplets = 64;
  std::uint64_t seed = 0;
};

/// Mean loss over mined triplets with identity reconstruction.
inline json cmd_aen_loss(const Raster& img, const GTMask& mask, const AenOptions& opt) {
  opt.weights.validate();
  const auto batch = aen::mine_triplets(img, mask, opt.patchSide, opt.triplets, opt.seed);
  std::size_t manip = 0;
  for (const auto& p : batch.patches) manip += p.label == aen::PatchClass::Manipulated;
  return {{"loss", sig6(aen::batch_loss(batch, opt.weights))},
          {"triplets", batch.triplets.size()},
          {"patches",
           {{"manipulated", manip}, {"nonManipulated", batch.patches.size() - manip}}},
          {"weights", {opt.weights.w0, opt.weights.w1, opt.weights.w2}},
          {"patchSide", opt.patchSide},
          {"seed", opt.seed}};
}

}  // namespace tamperscope::harness
