// partbench command-line driver. Exit codes: 0 success, 2 config error, 3 stage failure.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "partbench/error.hpp"
#include "partbench/pipeline.hpp"

namespace pb = partbench;

namespace {

constexpr int kConfigError = 2;
constexpr int kStageFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partbench: part-level 3D benchmark pipeline"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> completer;
  std::string mode = "auto";
  std::optional<std::string> external;
  std::optional<std::string> external_completions;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "pipeline configuration (JSON)")->required();
    sub->add_option("--seed", seed, "override the configured seed");
  };

  const char* stages[][2] = {{"gen", "generate the asset dataset"},
                             {"render", "render four-view bundles and ground truth"},
                             {"segment", "propose, rank and deduplicate part masks"},
                             {"eval", "score proposals: mAP and recall@K"},
                             {"complete", "complete occluded parts"},
                             {"carve", "carve per-part radiance fields"},
                             {"compose", "composite fields and score novel views"},
                             {"all", "run every stage"}};
  for (const auto& s : stages) {
    auto* sub = app.add_subcommand(s[0], s[1]);
    add_common(sub);
    if (std::string(s[0]) == "segment" || std::string(s[0]) == "all")
      sub->add_option("--mode", mode, "auto or seeded")->check(CLI::IsMember({"auto", "seeded"}));
    if (std::string(s[0]) == "segment")
      sub->add_option("--proposals", external, "directory of externally produced <asset>.json proposal files");
    if (std::string(s[0]) == "complete" || std::string(s[0]) == "all")
      sub->add_option("--completer", completer, "oracle, passthrough or symmetry");
    if (std::string(s[0]) == "complete")
      sub->add_option("--completions", external_completions, "directory of externally produced completions");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  auto* sub = app.get_subcommands().front();
  const auto name = sub->get_name();

  pb::PipelineConfig cfg;
  try {
    cfg = pb::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (completer) cfg.completer = *completer;
    pb::validate(cfg);
  } catch (const pb::Error& e) {
    std::cerr << "partbench: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (name == "gen") {
      auto m = pb::cmd_gen(cfg);
      std::cout << "generated " << m.assets.size() << " assets in " << cfg.output_dir << "\n";
    } else if (name == "render") {
      pb::cmd_render(cfg);
    } else if (name == "segment") {
      pb::cmd_segment(cfg, mode == "seeded" ? pb::SegmentMode::seeded : pb::SegmentMode::automatic, external);
    } else if (name == "eval") {
      std::cout << pb::cmd_eval(cfg);
    } else if (name == "complete") {
      pb::cmd_complete(cfg, pb::completer_from_string(cfg.completer), external_completions);
    } else if (name == "carve") {
      pb::cmd_carve(cfg);
    } else if (name == "compose") {
      std::cout << pb::cmd_compose(cfg);
    } else {
      std::cout << pb::cmd_all(cfg);
    }
  } catch (const pb::StageError& e) {
    std::cerr << "partbench: " << e.what() << "\n";
    return kStageFailure;
  } catch (const pb::Error& e) {
    std::cerr << "partbench: " << e.what() << "\n";
    return e.code() == "config-invalid" ? kConfigError : kStageFailure;
  }
  return 0;
}
