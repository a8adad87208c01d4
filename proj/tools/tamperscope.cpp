// tamperscope command-line front end.
#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "tamperscope/harness/commands.hpp"

namespace ts = tamperscope;
namespace hs = tamperscope::harness;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("tamperscope");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TAMPERSCOPE_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only accept real ones.
    if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
    else spdlog::warn("ignoring TAMPERSCOPE_LOG='{}'", env);
  }
}

std::vector<ts::Algo> parse_algos(const std::string& s) {
  if (s == "all") return {ts::kAllAlgos.begin(), ts::kAllAlgos.end()};
  std::vector<ts::Algo> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    const auto a = ts::parse_algo(tok);
    ts::require(a.has_value(), ts::ErrorKind::Argument, "unknown detector '" + tok + "'");
    if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
  }
  return out;
}

ts::aen::LossWeights parse_weights(const std::string& s) {
  std::vector<double> w;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    ts::require(end != tok.c_str() && *end == '\0', ts::ErrorKind::Argument,
                "--weights: '" + tok + "' is not a number");
    w.push_back(v);
  }
  ts::require(w.size() == 3, ts::ErrorKind::Argument, "--weights needs w0,w1,w2");
  return {w[0], w[1], w[2]};
}

int exit_for(const ts::Error& e) {
  spdlog::error("{}", e.what());
  return hs::kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Learning-free image manipulation localization toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hs::kToolVersion);

  std::string algo = "all", indexPath, outDir;
  int jobs = 1;
  ts::DetectorParams params;
  auto* detect = app.add_subcommand("detect", "run detectors over an index");
  detect->add_option("--algo", algo, "blk|dct|ela|cfa1|cfa2|noi1|noi2|noi4|all or a comma list")
      ->capture_default_str();
  detect->add_option("--index", indexPath, "dataset index CSV")->required();
  detect->add_option("--out", outDir, "output directory")->required();
  detect->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256))
      ->capture_default_str();
  detect->add_option("--ela-quality", params.elaQuality, "ELA re-save quality")
      ->check(CLI::Range(1, 100))->capture_default_str();
  detect->add_option("--noi1-block", params.noi1Block, "NOI1 block size")
      ->check(CLI::Range(2, 128))->capture_default_str();

  std::string predDir, reportPath;
  hs::ScoreOptions sopt;
  auto* score = app.add_subcommand("score", "score heatmaps against ground truth");
  score->add_option("--pred", predDir, "detect output directory")->required();
  score->add_option("--index", indexPath, "dataset index CSV")->required();
  score->add_option("--out", reportPath, "report JSON path")->required();
  score->add_flag("--pristine", sopt.pristine, "score pristine rows with the 10x10 protocol");
  score->add_option("--kernel", sopt.kernel, "no-score structuring element size")
      ->capture_default_str();
  score->add_option("--jobs", sopt.jobs, "worker threads")->check(CLI::Range(1, 256))
      ->capture_default_str();

  std::string specPath;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  auto* synthCmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synthCmd->add_option("--spec", specPath, "corpus spec JSON")->required();
  synthCmd->add_option("--n", n, "number of images")->required();
  synthCmd->add_option("--seed", seed, "corpus seed")->required();
  synthCmd->add_option("--out", outDir, "output directory")->required();

  std::string imagePath, maskPath, weights;
  hs::AenOptions aopt;
  auto* aenCmd = app.add_subcommand("aen-loss", "evaluate the triplet loss on one image");
  aenCmd->add_option("--image", imagePath, "image")->required();
  aenCmd->add_option("--mask", maskPath, "ground-truth mask")->required();
  aenCmd->add_option("--weights", weights, "w0,w1,w2")->required();
  aenCmd->add_option("--patch", aopt.patchSide, "patch side")->check(CLI::Range(2, 4096))
      ->capture_default_str();
  aenCmd->add_option("--triplets", aopt.triplets, "triplets to mine")->capture_default_str();
  aenCmd->add_option("--seed", aopt.seed, "mining seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hs::kExitInvalid;
  }

  try {
    if (*detect) {
      hs::DetectOptions opt{parse_algos(algo), params, outDir, jobs};
      const auto idx = hs::load_index(indexPath);
      spdlog::info("detect: {} images x {} detectors, {} jobs", idx.rows.size(),
                   opt.algos.size(), jobs);
      const auto sum = hs::cmd_detect(idx, opt);
      for (const auto& is : sum.issues)
        spdlog::warn("skipped {}{}{}: {}", is.imageId, is.detector.empty() ? "" : "/",
                     is.detector, is.reason);
      spdlog::info("wrote {} heatmaps", sum.heatmaps);
      return sum.exitCode();
    }
    if (*score) {
      sopt.pred = predDir;
      const auto idx = hs::load_index(indexPath);
      const auto out = hs::cmd_score(idx, sopt, reportPath);
      for (const auto& e : out.report["errors"])
        spdlog::warn("{}/{}: {}", e["id"].get<std::string>(),
                     e["detector"].get<std::string>(), e["error"].get<std::string>());
      spdlog::info("report {} written to {}", out.report["runId"].get<std::string>(),
                   reportPath);
      return out.exitCode();
    }
    if (*synthCmd) {
      const auto bytes = ts::imaging::read_file(specPath);
      const auto spec = hs::parse_synth_spec(std::string(bytes.begin(), bytes.end()));
      const auto sum = hs::cmd_synth(spec, n, seed, outDir);
      spdlog::info("wrote {} images, {} masks", sum.images, sum.masks);
      std::cout << sum.indexDigest << "\n";
      return hs::kExitOk;
    }
    if (*aenCmd) {
      aopt.weights = parse_weights(weights);
      const auto img = ts::imaging::load_image(imagePath);
      const auto mask = ts::imaging::load_mask(maskPath);
      std::cout << hs::cmd_aen_loss(img, mask, aopt).dump(2) << "\n";
      return hs::kExitOk;
    }
  } catch (const ts::Error& e) {
    return exit_for(e);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return hs::kExitInvalid;
  }
  return hs::kExitOk;
}
