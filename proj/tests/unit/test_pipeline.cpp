#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "json_util.hpp"
#include "partbench/error.hpp"
#include "partbench/io.hpp"
#include "partbench/metrics.hpp"
#include "partbench/pipeline.hpp"

using namespace partbench;
using namespace testing;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(const std::string& name) {
  PipelineConfig cfg;
  cfg.output_dir = scratch_dir(name).string();
  cfg.dataset_size = 3;
  cfg.tile_size = 32;
  cfg.carve_resolution = 32;
  cfg.novel_views = 2;
  cfg.recall_max_k = 5;
  return cfg;
}

}  // namespace

TEST_CASE("config round trip") {
  PipelineConfig cfg;
  cfg.seed = 77;
  cfg.taus = {0.5, 0.6, 0.75};
  cfg.noise = {0.3, 0.1, 2, 5};
  cfg.completer = "symmetry";
  cfg.step = 0.0125;
  auto text = config_to_json(cfg);
  auto back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(back.seed == 77);
  CHECK(back.noise.runs == 5);
  CHECK(back.taus == cfg.taus);
  CHECK(back.step == 0.0125);
}

TEST_CASE("config validation") {
  auto bad = [](const std::string& text) {
    try {
      config_from_json(text);
    } catch (const Error& e) {
      return e.code() == "config-invalid";
    }
    return false;
  };
  CHECK(bad("{"));
  CHECK(bad("[]"));
  CHECK(bad(R"({"dataset_sise": 3})"));
  CHECK(bad(R"({"version": 2})"));
  CHECK(bad(R"({"tile_size": 30})"));
  CHECK(bad(R"({"max_parts": 11})"));
  CHECK(bad(R"({"palette_size": 4})"));
  CHECK(bad(R"({"noise": {"merge_probability": 1.5}})"));
  CHECK(bad(R"({"noise": {"speed": 1}})"));
  CHECK(bad(R"({"completer": "diffusion"})"));
  CHECK(bad(R"({"carve_resolution": 300})"));
  CHECK(bad(R"({"seed": "seven"})"));
  CHECK_FALSE(bad("{}"));
  CHECK_THROWS_AS(load_config("/nonexistent/partbench.json"), Error);
}

TEST_CASE("seed point lies inside the mask") {
  auto ring = rect_mask(9, 9, 0, 0, 9, 9);
  for (int r = 2; r < 7; ++r)
    for (int c = 2; c < 7; ++c) ring.set(r, c, false);
  auto [r, c] = seed_point(ring);
  CHECK(ring.get(r, c));
  auto block = rect_mask(9, 9, 2, 2, 5, 5);
  CHECK(seed_point(block) == std::pair{3, 3});
  CHECK_THROWS_AS(seed_point(Mask(3, 3)), Error);
  // A long one-pixel tail pulls the centroid away from the block; the seed stays deep inside it.
  auto tailed = rect_mask(12, 40, 0, 0, 7, 7);
  for (int c = 7; c < 40; ++c) tailed.set(3, c);
  auto [tr, tc] = seed_point(tailed);
  CHECK(erode(erode(tailed, 1), 1).get(tr, tc));
}

TEST_CASE("assembly part selection") {
  auto a = rect_mask(8, 8, 0, 0, 4, 8), b = rect_mask(8, 8, 4, 0, 8, 8), ab = rect_mask(8, 8, 2, 0, 8, 8);
  RankedProposals r{{a, ab, b}, {3, 2, 1}, {0, 1, 2}};
  auto parts = select_assembly_parts(r);
  // ab is 2/3 covered by... a covers rows 2-3 of ab (1/3), so ab is kept; b is then fully covered.
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == a);
  CHECK(parts[1] == ab);
  CHECK(select_assembly_parts(RankedProposals{}).empty());
}

TEST_CASE("zero-noise segmentation recovers visible parts and scores mAP 1") {
  PipelineConfig cfg;
  cfg.tile_size = 32;
  cfg.noise = {0, 0, 0, 3};
  for (int i = 0; i < 5; ++i) {
    auto a = generate_asset(asset_seed(cfg, i));
    auto b = render_views(a, pipeline_rig(cfg, a));
    auto ranked = segment_bundle(b, cfg, sampler_seed(cfg, i));
    std::vector<Mask> gt;
    for (int k : visible_parts(b)) gt.push_back(b.part_masks[k]);
    CHECK(ranked.size() == gt.size());
    CHECK(average_precision(greedy_match(ranked.masks, gt, 0.5), static_cast<int>(gt.size())) == 1.0);
  }
}

TEST_CASE("oracle completion follows the best-matching part") {
  PipelineConfig cfg;
  cfg.tile_size = 32;
  auto a = generate_asset(4);
  auto b = render_views(a, pipeline_rig(cfg, a));
  for (int k : visible_parts(b)) {
    CHECK(best_gt_part(b.part_masks[k], b) == k);
    auto done = run_completer(CompleterKind::oracle, b, b.part_masks[k], 0);
    CHECK(done.part_image == b.part_rgb[k]);
  }
  CHECK(best_gt_part(Mask(64, 64), b) == -1);
  auto fallback = run_completer(CompleterKind::oracle, b, Mask(64, 64), 0);
  CHECK(fallback.completer == "passthrough");
}

TEST_CASE("single-part asset: compositional and unstructured paths coincide") {
  PipelineConfig cfg;
  cfg.tile_size = 32;
  cfg.carve_resolution = 48;
  cfg.novel_views = 2;
  cfg.noise = {0, 0, 0, 1};
  auto a = make_asset({Part{{primitive(PrimitiveKind::box, {0, 0, 0}, {0.5, 0.3, 0.4})}}}, "solo");
  ReassemblyArtifacts art;
  auto rep = reassembly_report(a, cfg, 0, &art);
  REQUIRE(rep.parts == 1);
  for (std::size_t v = 0; v < art.cameras.size(); ++v) {
    CHECK(art.compositional[v].rgb == art.unstructured[v].rgb);
    CHECK(art.compositional[v].alpha == art.unstructured[v].alpha);
  }
  CHECK(rep.delta() == 0.0);
}

TEST_CASE("passthrough completion hurts reassembly on occluded assets") {
  PipelineConfig cfg;
  cfg.tile_size = 48;
  cfg.carve_resolution = 48;
  cfg.novel_views = 3;
  cfg.noise = {0, 0, 0, 1};
  // Box behind a sphere: the box is heavily occluded in two views.
  auto a = make_asset({box_part({0, 0, -0.3}, {0.6, 0.35, 0.12}), sphere_part({0, 0, 0.3}, 0.42, {0.9, 0.8, 0.2})});
  auto oracle = reassembly_report(a, cfg, 0);
  cfg.completer = "passthrough";
  auto pass = reassembly_report(a, cfg, 0);
  CHECK(pass.mean_compositional < oracle.mean_compositional);
}

TEST_CASE("file-backed stages") {
  auto cfg = small_config("stages");
  const fs::path root = cfg.output_dir;
  auto summary = cmd_all(cfg);
  for (auto p : {"manifest.json", "assets/asset-0000.json", "views/asset-0000/rgb.png", "views/asset-0000/segmap.png",
                 "views/asset-0000/part_0_depth.pfm", "views/asset-0000/part_0_mask.rle.json",
                 "proposals/asset-0000.json", "proposals/asset-0000.seeded.json", "seeds/asset-0000.json",
                 "eval/metrics.json", "eval/per_sample.csv", "eval/recall.csv", "completions/summary.json",
                 "completions/asset-0000/part_0.pbcb", "fields/asset-0000/whole.pbpf",
                 "compose/reassembly.json", "compose/asset-0000/view_0_composite.png", "summary.json"})
    CHECK_MESSAGE(fs::exists(root / p), p);

  auto j = detail::parse(summary, "summary");
  CHECK(j.at("segmentation").at("mAP").contains("0.50"));
  CHECK(j.at("segmentation").at("mAP").contains("0.75"));
  CHECK(j.at("segmentation").at("recall_at_k").at("0.50").size() == 5);
  CHECK(j.at("segmentation").at("seeded_mAP").contains("0.50"));
  CHECK(j.at("completion").at("psnr").contains("oracle"));
  CHECK(j.at("reassembly").contains("delta"));

  SUBCASE("byte-identical rerun") {
    auto again = cmd_all(cfg);
    CHECK(again == summary);
  }
  SUBCASE("saved bundles reload exactly") {
    auto m = manifest_from_json(read_text((root / "manifest.json").string()));
    auto a = load_asset((root / m.assets[0].path).string());
    auto fresh = render_views(a, pipeline_rig(cfg, a));
    auto ranked_file = read_text((root / "proposals" / "asset-0000.json").string());
    CHECK(ranked_file.find("\"rle\"") != std::string::npos);
    auto stored = read_mask_png((root / "views/asset-0000/part_0_mask.png").string());
    CHECK(stored == fresh.part_masks[0]);
  }
  SUBCASE("external proposals") {
    auto ext = scratch_dir("external");
    // Re-emit the stored proposals without scores.
    auto m = manifest_from_json(read_text((root / "manifest.json").string()));
    for (const auto& e : m.assets) {
      auto j = detail::parse(read_text((root / "proposals" / (e.id + ".json")).string()), "p");
      for (auto& p : j.at("proposals")) p.erase("score");
      write_text((ext / (e.id + ".json")).string(), j.dump());
    }
    cmd_segment(cfg, SegmentMode::automatic, ext.string());
    CHECK_NOTHROW(cmd_eval(cfg));
  }
  SUBCASE("external completions") {
    auto ext = scratch_dir("external-completions");
    fs::copy(root / "completions", ext, fs::copy_options::recursive);
    cmd_complete(cfg, CompleterKind::oracle, ext.string());
    auto meta = read_text((root / "completions/asset-0000/part_0.json").string());
    CHECK(meta.find("external") != std::string::npos);
  }
}

TEST_CASE("missing inputs name the stage and path") {
  auto cfg = small_config("missing");
  try {
    cmd_render(cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "render");
    CHECK(std::string(e.what()).find("manifest.json") != std::string::npos);
  }
  cmd_gen(cfg);
  CHECK_THROWS_AS(cmd_segment(cfg, SegmentMode::automatic), StageError);
}
