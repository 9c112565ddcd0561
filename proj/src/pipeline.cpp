#include "partbench/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

#include "json_util.hpp"
#include "partbench/error.hpp"
#include "partbench/io.hpp"
#include "partbench/metrics.hpp"
#include "partbench/rng.hpp"
#include "partbench/segmap.hpp"

namespace fs = std::filesystem;

namespace partbench {

using detail::json;
using detail::number;

// ---------------------------------------------------------------------------
// Configuration

void validate(const PipelineConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) { throw Error("config-invalid", field + ": " + why); };
  if (c.version != kConfigVersion) fail("version", "unsupported config version");
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
  if (c.dataset_size < 1) fail("dataset_size", "must be at least 1");
  if (c.min_parts < 2 || c.max_parts > kMaxParts || c.min_parts > c.max_parts) fail("min_parts/max_parts", "must satisfy 2 <= min <= max <= 10");
  if (c.tile_size < 8 || c.tile_size % 4) fail("tile_size", "must be a multiple of 4, at least 8");
  if (!(c.fov > 10 && c.fov < 120)) fail("fov", "must lie in (10, 120)");
  if (!(c.distance_factor > 1)) fail("distance_factor", "camera must sit outside the asset");
  if (c.palette_size < 2 || c.palette_size > 64) fail("palette_size", "must lie in [2, 64]");
  if (c.palette_size < c.max_parts) fail("palette_size", "must be at least max_parts");
  if (c.min_pixels < 0) fail("min_pixels", "must be nonnegative");
  const auto& n = c.noise;
  if (n.merge_probability < 0 || n.merge_probability > 1) fail("noise.merge_probability", "must lie in [0, 1]");
  if (n.drop_probability < 0 || n.drop_probability > 1) fail("noise.drop_probability", "must lie in [0, 1]");
  if (n.morph_radius < 0) fail("noise.morph_radius", "must be nonnegative");
  if (n.runs < 1) fail("noise.runs", "must be at least 1");
  if (c.max_proposals < 0) fail("max_proposals", "must be nonnegative");
  if (c.taus.empty()) fail("taus", "must not be empty");
  for (auto t : c.taus)
    if (!(t > 0 && t <= 1)) fail("taus", "thresholds must lie in (0, 1]");
  if (c.recall_max_k < 1) fail("recall_max_k", "must be at least 1");
  try {
    completer_from_string(c.completer);
  } catch (const Error&) {
    fail("completer", "expected oracle, passthrough or symmetry");
  }
  if (!(c.occlusion_threshold >= 0 && c.occlusion_threshold <= 1)) fail("occlusion_threshold", "must lie in [0, 1]");
  if (c.carve_resolution < 32 || c.carve_resolution > 256) fail("carve_resolution", "must lie in [32, 256]");
  if (!(c.kappa > 0)) fail("kappa", "must be positive");
  if (c.step < 0) fail("step", "must be nonnegative");
  if (c.novel_views < 1) fail("novel_views", "must be at least 1");
  if (!(c.novel_max_elevation >= 0 && c.novel_max_elevation < 90)) fail("novel_max_elevation", "must lie in [0, 90)");
}

std::string config_to_json(const PipelineConfig& c) {
  json taus = json::array();
  for (auto t : c.taus) taus.push_back(number(t));
  json j{{"version", c.version},
         {"output_dir", c.output_dir},
         {"dataset_size", c.dataset_size},
         {"seed", c.seed},
         {"min_parts", c.min_parts},
         {"max_parts", c.max_parts},
         {"tile_size", c.tile_size},
         {"fov", number(c.fov)},
         {"distance_factor", number(c.distance_factor)},
         {"palette_size", c.palette_size},
         {"min_pixels", c.min_pixels},
         {"noise",
          {{"merge_probability", number(c.noise.merge_probability)},
           {"drop_probability", number(c.noise.drop_probability)},
           {"morph_radius", c.noise.morph_radius},
           {"runs", c.noise.runs}}},
         {"max_proposals", c.max_proposals},
         {"taus", taus},
         {"recall_max_k", c.recall_max_k},
         {"completer", c.completer},
         {"occlusion_threshold", number(c.occlusion_threshold)},
         {"carve_resolution", c.carve_resolution},
         {"kappa", number(c.kappa)},
         {"step", number(c.step)},
         {"novel_views", c.novel_views},
         {"novel_max_elevation", number(c.novel_max_elevation)}};
  return detail::dump(j, 2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("config-invalid", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config-invalid", "top level must be an object");
  static const std::vector<std::string> known = {
      "version", "output_dir", "dataset_size", "seed", "min_parts", "max_parts", "tile_size", "fov",
      "distance_factor", "palette_size", "min_pixels", "noise", "max_proposals", "taus", "recall_max_k",
      "completer", "occlusion_threshold", "carve_resolution", "kappa", "step", "novel_views", "novel_max_elevation"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw Error("config-invalid", "unknown key '" + key + "'");
  PipelineConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("version", c.version);
    get("output_dir", c.output_dir);
    get("dataset_size", c.dataset_size);
    get("seed", c.seed);
    get("min_parts", c.min_parts);
    get("max_parts", c.max_parts);
    get("tile_size", c.tile_size);
    get("fov", c.fov);
    get("distance_factor", c.distance_factor);
    get("palette_size", c.palette_size);
    get("min_pixels", c.min_pixels);
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      for (const auto& [key, _] : n.items())
        if (key != "merge_probability" && key != "drop_probability" && key != "morph_radius" && key != "runs")
          throw Error("config-invalid", "unknown key 'noise." + key + "'");
      if (n.contains("merge_probability")) c.noise.merge_probability = n.at("merge_probability").get<double>();
      if (n.contains("drop_probability")) c.noise.drop_probability = n.at("drop_probability").get<double>();
      if (n.contains("morph_radius")) c.noise.morph_radius = n.at("morph_radius").get<int>();
      if (n.contains("runs")) c.noise.runs = n.at("runs").get<int>();
    }
    get("max_proposals", c.max_proposals);
    get("taus", c.taus);
    get("recall_max_k", c.recall_max_k);
    get("completer", c.completer);
    get("occlusion_threshold", c.occlusion_threshold);
    get("carve_resolution", c.carve_resolution);
    get("kappa", c.kappa);
    get("step", c.step);
    get("novel_views", c.novel_views);
    get("novel_max_elevation", c.novel_max_elevation);
  } catch (const json::exception& e) {
    throw Error("config-invalid", e.what());
  }
  validate(c);
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error&) {
    throw Error("config-invalid", "cannot read " + path);
  }
  return config_from_json(text);
}

std::uint64_t asset_seed(const PipelineConfig& cfg, int index) { return mix_seed(cfg.seed, 0x10000 + index); }
std::uint64_t sampler_seed(const PipelineConfig& cfg, int index) { return mix_seed(cfg.seed, 0x20000 + index); }
std::uint64_t novel_view_seed(const PipelineConfig& cfg, int index) { return mix_seed(cfg.seed, 0x30000 + index); }

Rig pipeline_rig(const PipelineConfig& cfg, const Asset& asset) {
  return make_rig(cfg.tile_size, cfg.tile_size, cfg.distance_factor * asset.radius(), cfg.fov);
}

Aabb carve_bounds(const Asset& asset) {
  auto r = asset.radius() * 1.02;
  return {{-r, -r, -r}, {r, r, r}};
}

double render_step(const PipelineConfig& cfg, const Asset& asset) {
  if (cfg.step > 0) return cfg.step;
  return 0.5 * carve_bounds(asset).size().x / cfg.carve_resolution;
}

// ---------------------------------------------------------------------------
// Per-asset stages

std::vector<int> visible_parts(const ViewBundle& bundle) {
  std::vector<int> out;
  for (int k = 0; k < bundle.part_count(); ++k)
    if (!bundle.part_masks[k].empty()) out.push_back(k);
  return out;
}

namespace {

std::vector<Mask> visible_masks(const ViewBundle& bundle) {
  std::vector<Mask> out;
  for (int k : visible_parts(bundle)) out.push_back(bundle.part_masks[k]);
  return out;
}

}  // namespace

RankedProposals cap_proposals(RankedProposals ranked, int max_proposals) {
  if (max_proposals > 0 && ranked.size() > static_cast<std::size_t>(max_proposals)) {
    ranked.masks.resize(max_proposals);
    ranked.scores.resize(max_proposals);
    ranked.source.resize(max_proposals);
  }
  return ranked;
}

RankedProposals segment_bundle(const ViewBundle& bundle, const PipelineConfig& cfg, std::uint64_t seed) {
  auto set = sample_noisy_oracle(visible_masks(bundle), cfg.noise, seed, bundle.tile_height, bundle.tile_width);
  return cap_proposals(rank_and_dedup(set), cfg.max_proposals);
}

namespace {

std::pair<int, int> centroid_pixel(const Mask& m) {
  double sr = 0, sc = 0;
  std::size_t n = 0;
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c)
      if (m.get(r, c)) {
        sr += r;
        sc += c;
        ++n;
      }
  sr /= n;
  sc /= n;
  std::pair<int, int> best{-1, -1};
  double best_d = INFINITY;
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c) {
      if (!m.get(r, c)) continue;
      auto d = (r - sr) * (r - sr) + (c - sc) * (c - sc);
      if (d < best_d) {
        best_d = d;
        best = {r, c};
      }
    }
  return best;
}

}  // namespace

std::pair<int, int> seed_point(const Mask& m) {
  if (m.empty()) throw Error("invalid-argument", "seed point of an empty mask");
  // Peel the mask down to its deepest non-empty erosion so the seed avoids thin rims.
  Mask core = m;
  for (auto next = erode(core, 1); !next.empty(); next = erode(core, 1)) core = std::move(next);
  return centroid_pixel(core);
}

std::vector<Mask> select_assembly_parts(const RankedProposals& ranked) {
  std::vector<Mask> out;
  if (ranked.masks.empty()) return out;
  Mask covered(ranked.masks[0].height(), ranked.masks[0].width());
  for (const auto& m : ranked.masks) {
    if (2 * intersection_count(m, covered) >= m.count()) continue;
    out.push_back(m);
    covered |= m;
  }
  return out;
}

int best_gt_part(const Mask& proposal, const ViewBundle& bundle) {
  int best = -1;
  double best_iou = 0;
  for (int k = 0; k < bundle.part_count(); ++k) {
    if (intersection_count(proposal, bundle.part_masks[k]) == 0) continue;
    auto m = iou(proposal, bundle.part_masks[k]);
    if (m > best_iou) {
      best_iou = m;
      best = k;
    }
  }
  return best;
}

CompletionResult run_completer(CompleterKind kind, const ViewBundle& bundle, const Mask& mask, std::uint64_t seed) {
  auto req = make_request(bundle.rgb, mask, bundle.tile_height, bundle.tile_width, seed);
  switch (kind) {
    case CompleterKind::oracle: {
      auto g = best_gt_part(mask, bundle);
      if (g < 0) return complete_passthrough(req);
      return complete_oracle(req, bundle.part_rgb[g], bundle.part_silhouette(g));
    }
    case CompleterKind::passthrough: return complete_passthrough(req);
    case CompleterKind::symmetry: return complete_symmetry(req);
  }
  throw Error("invalid-argument", "unknown completer");
}

std::vector<CompletionScore> score_completions(const ViewBundle& bundle, int asset_index) {
  std::vector<CompletionScore> out;
  for (int k : visible_parts(bundle)) {
    auto silhouette = bundle.part_silhouette(k);
    auto req = make_request(bundle.rgb, bundle.part_masks[k], bundle.tile_height, bundle.tile_width);
    CompletionScore s;
    s.asset = asset_index;
    s.part = k;
    s.occlusion = 1.0 - static_cast<double>(bundle.part_masks[k].count()) / static_cast<double>(silhouette.count());
    const auto& gt = bundle.part_rgb[k];
    s.psnr_oracle = foreground_psnr(gt, complete_oracle(req, gt, silhouette).part_image, silhouette);
    s.psnr_symmetry = foreground_psnr(gt, complete_symmetry(req).part_image, silhouette);
    s.psnr_passthrough = foreground_psnr(gt, complete_passthrough(req).part_image, silhouette);
    out.push_back(s);
  }
  return out;
}

std::vector<Camera> novel_cameras(const PipelineConfig& cfg, const Asset& asset, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x6e6f76));
  std::vector<Camera> cams;
  for (int v = 0; v < cfg.novel_views; ++v) {
    auto az = rng.uniform(0, 360);
    auto el = rng.uniform(0, cfg.novel_max_elevation);
    cams.emplace_back(az, el, cfg.distance_factor * asset.radius(), cfg.fov, cfg.tile_size, cfg.tile_size);
  }
  return cams;
}

ReassemblyReport evaluate_reassembly(const Asset& asset, const Assembly& assembly, const PartField& unstructured,
                                     const PipelineConfig& cfg, std::uint64_t view_seed, ReassemblyArtifacts* artifacts) {
  ReassemblyReport report;
  report.asset_id = asset.id;
  report.parts = static_cast<int>(assembly.fields.size());
  const auto step = render_step(cfg, asset);
  for (const auto& cam : novel_cameras(cfg, asset, view_seed)) {
    auto gt = render_camera(asset, cam);
    auto composite = compose_render(assembly, cam, step);
    auto whole = render_field(unstructured, cam, step);
    report.psnr_compositional.push_back(foreground_psnr(gt.rgb, composite.rgb, gt.foreground));
    report.psnr_unstructured.push_back(foreground_psnr(gt.rgb, whole.rgb, gt.foreground));
    if (artifacts) {
      artifacts->cameras.push_back(cam);
      artifacts->ground_truth.push_back(std::move(gt));
      artifacts->compositional.push_back(std::move(composite));
      artifacts->unstructured.push_back(std::move(whole));
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (auto x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  report.mean_compositional = mean(report.psnr_compositional);
  report.mean_unstructured = mean(report.psnr_unstructured);
  return report;
}

ReassemblyReport reassembly_report(const Asset& asset, const PipelineConfig& cfg, int asset_index,
                                   ReassemblyArtifacts* artifacts) {
  auto rig = pipeline_rig(cfg, asset);
  auto bundle = render_views(asset, rig);
  auto ranked = segment_bundle(bundle, cfg, sampler_seed(cfg, asset_index));
  auto kind = completer_from_string(cfg.completer);
  const auto bounds = carve_bounds(asset);
  CarveConfig carve_cfg{cfg.carve_resolution, cfg.kappa, CarveRule::all_views};
  Assembly assembly;
  int i = 0;
  for (const auto& part : select_assembly_parts(ranked)) {
    auto done = run_completer(kind, bundle, part, sampler_seed(cfg, asset_index));
    assembly.fields.push_back(carve(done.part_image, done.foreground, rig, bundle.tile_height, bundle.tile_width, bounds, carve_cfg).field);
    assembly.labels.push_back("part-" + std::to_string(i++));
  }
  auto whole = carve(bundle.rgb, bundle.foreground, rig, bundle.tile_height, bundle.tile_width, bounds, carve_cfg).field;
  return evaluate_reassembly(asset, assembly, whole, cfg, novel_view_seed(cfg, asset_index), artifacts);
}

// ---------------------------------------------------------------------------
// File-backed stages

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string tau_key(double tau) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", tau);
  return buf;
}

struct Layout {
  fs::path root;
  fs::path manifest() const { return root / "manifest.json"; }
  fs::path asset(const std::string& id) const { return root / "assets" / (id + ".json"); }
  fs::path views(const std::string& id) const { return root / "views" / id; }
  fs::path proposals(const std::string& id) const { return root / "proposals" / (id + ".json"); }
  fs::path seeded(const std::string& id) const { return root / "proposals" / (id + ".seeded.json"); }
  fs::path seeds(const std::string& id) const { return root / "seeds" / (id + ".json"); }
  fs::path eval() const { return root / "eval"; }
  fs::path completions(const std::string& id) const { return root / "completions" / id; }
  fs::path fields(const std::string& id) const { return root / "fields" / id; }
  fs::path compose(const std::string& id) const { return root / "compose" / id; }
};

std::string part_name(int k) { return "part_" + std::to_string(k); }

void require(const fs::path& p) {
  if (!fs::exists(p)) throw Error("missing-input", p.string());
}

DatasetManifest load_manifest(const Layout& L) {
  require(L.manifest());
  return manifest_from_json(read_text(L.manifest().string()));
}

Asset load_entry_asset(const Layout& L, const ManifestEntry& e) {
  auto p = L.root / e.path;
  require(p);
  return load_asset(p.string());
}

void save_bundle(const fs::path& dir, const ViewBundle& b, const Asset& asset, const PipelineConfig& cfg,
                 std::uint64_t seed) {
  fs::create_directories(dir);
  write_png((dir / "rgb.png").string(), b.rgb);
  write_mask_png((dir / "foreground.png").string(), b.foreground);
  for (int k = 0; k < b.part_count(); ++k) {
    write_pfm((dir / (part_name(k) + "_depth.pfm")).string(), b.part_depth[k]);
    write_png((dir / (part_name(k) + ".png")).string(), b.part_rgb[k]);
    write_mask_png((dir / (part_name(k) + "_mask.png")).string(), b.part_masks[k]);
    write_text((dir / (part_name(k) + "_mask.rle.json")).string(), detail::dump(detail::rle_json(rle_encode(b.part_masks[k]))) + "\n");
  }
  // Colour-coded segmentation target with its naming permutation.
  auto palette = make_palette(cfg.palette_size, cfg.seed);
  auto perm = random_permutation(cfg.palette_size, seed);
  write_png((dir / "segmap.png").string(), encode_segmap(b.part_masks, palette, perm));
  json pal = json::array();
  for (const auto& c : palette.colors) pal.push_back({number(c[0]), number(c[1]), number(c[2])});
  write_text((dir / "segmap.json").string(), detail::dump(json{{"palette", pal}, {"permutation", perm}}, 1) + "\n");

  json rig = json::array();
  for (const auto& cam : b.rig)
    rig.push_back({{"azimuth", number(cam.azimuth())},
                   {"elevation", number(cam.elevation())},
                   {"distance", number(cam.distance())},
                   {"fov", number(cam.fov())}});
  write_text((dir / "bundle.json").string(),
             detail::dump(json{{"id", asset.id}, {"tile", {b.tile_height, b.tile_width}}, {"parts", b.part_count()}, {"rig", rig}}, 1) + "\n");
}

ViewBundle load_bundle(const fs::path& dir) {
  require(dir / "bundle.json");
  auto meta = detail::parse(read_text((dir / "bundle.json").string()), "bundle");
  ViewBundle b;
  b.tile_height = meta.at("tile").at(0).get<int>();
  b.tile_width = meta.at("tile").at(1).get<int>();
  for (const auto& c : meta.at("rig"))
    b.rig.emplace_back(c.at("azimuth").get<double>(), c.at("elevation").get<double>(), c.at("distance").get<double>(),
                       c.at("fov").get<double>(), b.tile_height, b.tile_width);
  require(dir / "rgb.png");
  b.rgb = read_png((dir / "rgb.png").string());
  const int parts = meta.at("parts").get<int>();
  for (int k = 0; k < parts; ++k) {
    auto depth = dir / (part_name(k) + "_depth.pfm");
    auto rgb = dir / (part_name(k) + ".png");
    require(depth);
    require(rgb);
    b.part_depth.push_back(read_pfm(depth.string()));
    b.part_rgb.push_back(read_png(rgb.string()));
  }
  b.part_masks = derive_masks(b.part_depth);
  b.foreground = Mask(b.grid_height(), b.grid_width());
  for (const auto& m : b.part_masks) b.foreground |= m;
  return b;
}

Rig rig_of(const ViewBundle& b) { return {b.rig[0], b.rig[1], b.rig[2], b.rig[3]}; }

void save_ranked(const fs::path& p, const std::string& id, const RankedProposals& ranked, int h, int w) {
  json props = json::array();
  for (std::size_t i = 0; i < ranked.size(); ++i)
    props.push_back({{"rle", detail::rle_json(rle_encode(ranked.masks[i]))},
                     {"score", number(ranked.scores[i])},
                     {"source", ranked.source[i]}});
  write_text(p.string(), detail::dump(json{{"asset", id}, {"mode", "auto"}, {"size", {h, w}}, {"proposals", props}}) + "\n");
}

RankedProposals load_ranked(const fs::path& p) {
  require(p);
  auto j = detail::parse(read_text(p.string()), "proposals");
  RankedProposals r;
  for (const auto& e : j.at("proposals")) {
    r.masks.push_back(rle_decode(detail::rle_from(e.at("rle"))));
    r.scores.push_back(e.at("score").get<double>());
    r.source.push_back(e.at("source").get<int>());
  }
  return r;
}

// Third-party proposals: {"proposals": [{"rle": ..., "score": optional}]}. Scores, when every
// proposal has one, order the list; otherwise the overlap-frequency score is used.
RankedProposals load_external(const fs::path& p, const PipelineConfig& cfg) {
  require(p);
  auto j = detail::parse(read_text(p.string()), "external proposals");
  ProposalSet set;
  std::vector<Mask> masks;
  std::vector<double> scores;
  bool scored = true;
  int i = 0;
  for (const auto& e : j.at("proposals")) {
    auto m = rle_decode(detail::rle_from(e.at("rle")));
    masks.push_back(m);
    set.proposals.push_back({std::move(m), 0, i++});
    if (e.contains("score"))
      scores.push_back(e.at("score").get<double>());
    else
      scored = false;
  }
  auto ranked = scored ? rank_and_dedup(masks, scores) : rank_and_dedup(set);
  return cap_proposals(std::move(ranked), cfg.max_proposals);
}

template <class F>
auto run_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

json completion_summary(const std::vector<CompletionScore>& scores, double threshold) {
  double so = 0, ss = 0, sp = 0;
  int n = 0, ordered = 0;
  for (const auto& s : scores) {
    if (s.occlusion < threshold) continue;
    so += s.psnr_oracle;
    ss += s.psnr_symmetry;
    sp += s.psnr_passthrough;
    ++n;
    if (s.psnr_oracle >= s.psnr_symmetry && s.psnr_symmetry >= s.psnr_passthrough) ++ordered;
  }
  auto avg = [&](double v) { return n ? number(v / n) : json(nullptr); };
  return {{"parts_scored", scores.size()},
          {"occluded_parts", n},
          {"occlusion_threshold", number(threshold)},
          {"psnr", {{"oracle", avg(so)}, {"symmetry", avg(ss)}, {"passthrough", avg(sp)}}},
          {"ordering_rate", n ? number(static_cast<double>(ordered) / n) : json(nullptr)}};
}

}  // namespace

DatasetManifest cmd_gen(const PipelineConfig& cfg) {
  return run_stage("gen", [&] {
    validate(cfg);
    Layout L{cfg.output_dir};
    fs::create_directories(L.root / "assets");
    DatasetManifest m;
    m.seed = cfg.seed;
    GeneratorSpec spec;
    spec.min_parts = cfg.min_parts;
    spec.max_parts = cfg.max_parts;
    for (int i = 0; i < cfg.dataset_size; ++i) {
      auto seed = asset_seed(cfg, i);
      auto asset = generate_asset(seed, spec);
      char id[32];
      std::snprintf(id, sizeof id, "asset-%04d", i);
      asset.id = id;
      save_asset(asset, L.asset(asset.id).string());
      m.assets.push_back({asset.id, "assets/" + asset.id + ".json", static_cast<int>(asset.parts.size()),
                          part_volume_fractions(asset, spec.volume_samples, seed)});
    }
    write_text(L.manifest().string(), manifest_to_json(m));
    return m;
  });
}

void cmd_render(const PipelineConfig& cfg) {
  run_stage("render", [&] {
    Layout L{cfg.output_dir};
    auto m = load_manifest(L);
    for (std::size_t i = 0; i < m.assets.size(); ++i) {
      auto asset = load_entry_asset(L, m.assets[i]);
      auto bundle = render_views(asset, pipeline_rig(cfg, asset));
      save_bundle(L.views(asset.id), bundle, asset, cfg, asset_seed(cfg, static_cast<int>(i)));
    }
  });
}

void cmd_segment(const PipelineConfig& cfg, SegmentMode mode, const std::optional<std::string>& external_dir) {
  run_stage("segment", [&] {
    Layout L{cfg.output_dir};
    auto m = load_manifest(L);
    fs::create_directories(L.root / "proposals");
    for (std::size_t i = 0; i < m.assets.size(); ++i) {
      const auto& id = m.assets[i].id;
      auto bundle = load_bundle(L.views(id));
      auto ranked = external_dir ? load_external(fs::path(*external_dir) / (id + ".json"), cfg)
                                 : segment_bundle(bundle, cfg, sampler_seed(cfg, static_cast<int>(i)));
      save_ranked(L.proposals(id), id, ranked, bundle.grid_height(), bundle.grid_width());
      if (mode != SegmentMode::seeded) continue;

      // Seed points: read the user's file when present, otherwise derive one per visible part.
      json seeds;
      if (fs::exists(L.seeds(id))) {
        seeds = detail::parse(read_text(L.seeds(id).string()), "seed points");
      } else {
        seeds = json::array();
        for (int k : visible_parts(bundle)) {
          auto [r, c] = seed_point(bundle.part_masks[k]);
          seeds.push_back({{"part", k}, {"row", r}, {"col", c}});
        }
        fs::create_directories(L.seeds(id).parent_path());
        write_text(L.seeds(id).string(), detail::dump(seeds, 1) + "\n");
      }
      json out = json::array();
      for (const auto& s : seeds) {
        auto r = s.at("row").get<int>(), c = s.at("col").get<int>();
        // Positions into the ranked list saved above.
        json kept = json::array();
        for (std::size_t k = 0; k < ranked.size(); ++k)
          if (ranked.masks[k].get(r, c)) kept.push_back(k);
        out.push_back({{"part", s.at("part")}, {"row", r}, {"col", c}, {"ranked", kept}});
      }
      write_text(L.seeded(id).string(), detail::dump(json{{"asset", id}, {"mode", "seeded"}, {"queries", out}}, 1) + "\n");
    }
  });
}

std::string cmd_eval(const PipelineConfig& cfg) {
  return run_stage("eval", [&] {
    Layout L{cfg.output_dir};
    auto m = load_manifest(L);
    fs::create_directories(L.eval());
    const auto& taus = cfg.taus;
    std::vector<std::vector<double>> ap(taus.size()), seeded_ap(taus.size());
    std::vector<std::vector<double>> recall_sum(taus.size(), std::vector<double>(cfg.recall_max_k, 0.0));
    std::ostringstream per_sample, recall_csv, seeded_csv;
    per_sample << "asset,gt_parts,proposals";
    for (auto t : taus) per_sample << ",ap@" << tau_key(t);
    per_sample << "\n";
    recall_csv << "asset,tau,k,recall\n";
    seeded_csv << "asset,part,row,col,tau,ap\n";
    bool any_seeded = false;
    int samples = 0;
    for (const auto& e : m.assets) {
      auto bundle = load_bundle(L.views(e.id));
      auto gt = visible_masks(bundle);
      if (gt.empty()) continue;
      auto ranked = load_ranked(L.proposals(e.id));
      ++samples;
      per_sample << e.id << "," << gt.size() << "," << ranked.size();
      for (std::size_t t = 0; t < taus.size(); ++t) {
        auto a = average_precision(greedy_match(ranked.masks, gt, taus[t]), static_cast<int>(gt.size()));
        ap[t].push_back(a);
        per_sample << "," << fmt(a);
        for (int k = 1; k <= cfg.recall_max_k; ++k) {
          auto r = recall_at_k(ranked.masks, gt, taus[t], k);
          recall_sum[t][k - 1] += r;
          recall_csv << e.id << "," << tau_key(taus[t]) << "," << k << "," << fmt(r) << "\n";
        }
      }
      per_sample << "\n";
      if (!fs::exists(L.seeded(e.id))) continue;
      any_seeded = true;
      auto sj = detail::parse(read_text(L.seeded(e.id).string()), "seeded proposals");
      for (const auto& q : sj.at("queries")) {
        auto part = q.at("part").get<int>();
        if (part < 0 || part >= bundle.part_count()) throw Error("bad-format", "seed part index out of range");
        auto query = seeded_query(ranked, q.at("row").get<int>(), q.at("col").get<int>());
        for (std::size_t t = 0; t < taus.size(); ++t) {
          auto a = average_precision(greedy_match(query.masks, {bundle.part_masks[part]}, taus[t]), 1);
          seeded_ap[t].push_back(a);
          seeded_csv << e.id << "," << part << "," << q.at("row").get<int>() << "," << q.at("col").get<int>() << ","
                     << tau_key(taus[t]) << "," << fmt(a) << "\n";
        }
      }
    }
    if (samples == 0) throw Error("empty-dataset", "no asset has visible ground-truth parts");
    json map = json::object(), seeded = json::object(), recall = json::object();
    for (std::size_t t = 0; t < taus.size(); ++t) {
      auto key = tau_key(taus[t]);
      map[key] = number(mean_ap(ap[t]));
      json curve = json::array();
      for (auto s : recall_sum[t]) curve.push_back(number(s / samples));
      recall[key] = curve;
      if (any_seeded && !seeded_ap[t].empty()) seeded[key] = number(mean_ap(seeded_ap[t]));
    }
    json report{{"samples", samples},
                {"mAP", map},
                {"recall_at_k", recall},
                {"seeded_mAP", any_seeded ? seeded : json(nullptr)},
                {"absent_metrics", {"CLIP", "LPIPS"}}};
    write_text((L.eval() / "per_sample.csv").string(), per_sample.str());
    write_text((L.eval() / "recall.csv").string(), recall_csv.str());
    if (any_seeded) write_text((L.eval() / "seeded.csv").string(), seeded_csv.str());
    auto text = detail::dump(report, 1) + "\n";
    write_text((L.eval() / "metrics.json").string(), text);
    return text;
  });
}

void cmd_complete(const PipelineConfig& cfg, CompleterKind kind, const std::optional<std::string>& external_dir) {
  run_stage("complete", [&] {
    Layout L{cfg.output_dir};
    auto m = load_manifest(L);
    std::vector<CompletionScore> scores;
    std::ostringstream csv;
    csv << "asset,part,occlusion,psnr_oracle,psnr_symmetry,psnr_passthrough\n";
    for (std::size_t i = 0; i < m.assets.size(); ++i) {
      const auto& id = m.assets[i].id;
      auto bundle = load_bundle(L.views(id));
      auto ranked = load_ranked(L.proposals(id));
      auto dir = L.completions(id);
      fs::remove_all(dir);
      fs::create_directories(dir);
      auto parts = select_assembly_parts(ranked);
      for (std::size_t k = 0; k < parts.size(); ++k) {
        auto seed = mix_seed(sampler_seed(cfg, static_cast<int>(i)), k);
        auto name = part_name(static_cast<int>(k));
        CompletionResult done;
        if (external_dir) {
          auto src = fs::path(*external_dir) / id;
          require(src / (name + ".png"));
          require(src / (name + "_mask.png"));
          done.part_image = read_png((src / (name + ".png")).string());
          done.foreground = read_mask_png((src / (name + "_mask.png")).string());
          done.completer = "external";
          done.seed = seed;
        } else {
          done = run_completer(kind, bundle, parts[k], seed);
        }
        write_png((dir / (name + ".png")).string(), done.part_image);
        write_mask_png((dir / (name + "_mask.png")).string(), done.foreground);
        write_mask_png((dir / (name + "_input_mask.png")).string(), parts[k]);
        auto req = make_request(bundle.rgb, parts[k], bundle.tile_height, bundle.tile_width, seed);
        write_bytes((dir / (name + ".pbcb")).string(), serialize_conditioning(pack_conditioning(req)));
        write_text((dir / (name + ".json")).string(),
                   detail::dump(json{{"completer", done.completer}, {"seed", done.seed}, {"no_evidence", done.no_evidence}}, 1) + "\n");
      }
      for (const auto& s : score_completions(bundle, static_cast<int>(i))) {
        scores.push_back(s);
        csv << id << "," << s.part << "," << fmt(s.occlusion) << "," << fmt(s.psnr_oracle) << "," << fmt(s.psnr_symmetry)
            << "," << fmt(s.psnr_passthrough) << "\n";
      }
    }
    write_text((L.root / "completions" / "scores.csv").string(), csv.str());
    write_text((L.root / "completions" / "summary.json").string(),
               detail::dump(completion_summary(scores, cfg.occlusion_threshold), 1) + "\n");
  });
}

void cmd_carve(const PipelineConfig& cfg) {
  run_stage("carve", [&] {
    Layout L{cfg.output_dir};
    auto m = load_manifest(L);
    CarveConfig carve_cfg{cfg.carve_resolution, cfg.kappa, CarveRule::all_views};
    for (const auto& e : m.assets) {
      auto asset = load_entry_asset(L, e);
      auto bundle = load_bundle(L.views(e.id));
      auto rig = rig_of(bundle);
      auto bounds = carve_bounds(asset);
      auto src = L.completions(e.id);
      auto dst = L.fields(e.id);
      fs::remove_all(dst);
      fs::create_directories(dst);
      for (int k = 0;; ++k) {
        auto img = src / (part_name(k) + ".png");
        if (!fs::exists(img)) break;
        auto mask = src / (part_name(k) + "_mask.png");
        require(mask);
        auto f = carve(read_png(img.string()), read_mask_png(mask.string()), rig, bundle.tile_height, bundle.tile_width,
                       bounds, carve_cfg);
        write_bytes((dst / (part_name(k) + ".pbpf")).string(), serialize_field(f.field));
      }
      auto whole = carve(bundle.rgb, bundle.foreground, rig, bundle.tile_height, bundle.tile_width, bounds, carve_cfg);
      write_bytes((dst / "whole.pbpf").string(), serialize_field(whole.field));
    }
  });
}

std::string cmd_compose(const PipelineConfig& cfg) {
  return run_stage("compose", [&] {
    Layout L{cfg.output_dir};
    auto m = load_manifest(L);
    std::ostringstream csv;
    csv << "asset,view,azimuth,elevation,psnr_compositional,psnr_unstructured\n";
    json assets = json::array();
    double sum_c = 0, sum_u = 0;
    for (std::size_t i = 0; i < m.assets.size(); ++i) {
      const auto& e = m.assets[i];
      auto asset = load_entry_asset(L, e);
      auto src = L.fields(e.id);
      Assembly assembly;
      for (int k = 0;; ++k) {
        auto p = src / (part_name(k) + ".pbpf");
        if (!fs::exists(p)) break;
        assembly.fields.push_back(parse_field(read_bytes(p.string())));
        assembly.labels.push_back(part_name(k));
      }
      require(src / "whole.pbpf");
      auto whole = parse_field(read_bytes((src / "whole.pbpf").string()));
      ReassemblyArtifacts art;
      auto report = evaluate_reassembly(asset, assembly, whole, cfg, novel_view_seed(cfg, static_cast<int>(i)), &art);
      auto dir = L.compose(e.id);
      fs::create_directories(dir);
      for (std::size_t v = 0; v < art.cameras.size(); ++v) {
        auto tag = "view_" + std::to_string(v);
        write_png((dir / (tag + "_gt.png")).string(), art.ground_truth[v].rgb);
        write_png((dir / (tag + "_composite.png")).string(), art.compositional[v].rgb);
        write_png((dir / (tag + "_unstructured.png")).string(), art.unstructured[v].rgb);
        for (std::size_t h = 0; h < assembly.fields.size(); ++h) {
          DepthMap vis(art.cameras[v].height(), art.cameras[v].width());
          vis.data = art.compositional[v].part_visibility[h];
          write_pfm((dir / (tag + "_visibility_" + part_name(static_cast<int>(h)) + ".pfm")).string(), vis);
        }
        csv << e.id << "," << v << "," << fmt(art.cameras[v].azimuth()) << "," << fmt(art.cameras[v].elevation()) << ","
            << fmt(report.psnr_compositional[v]) << "," << fmt(report.psnr_unstructured[v]) << "\n";
      }
      sum_c += report.mean_compositional;
      sum_u += report.mean_unstructured;
      assets.push_back({{"asset", e.id},
                        {"parts", report.parts},
                        {"psnr_compositional", number(report.mean_compositional)},
                        {"psnr_unstructured", number(report.mean_unstructured)},
                        {"delta", number(report.delta())}});
    }
    const double n = static_cast<double>(m.assets.size());
    json report{{"assets", assets},
                {"psnr_compositional", number(sum_c / n)},
                {"psnr_unstructured", number(sum_u / n)},
                {"delta", number((sum_c - sum_u) / n)},
                {"absent_metrics", {"CLIP", "LPIPS"}}};
    fs::create_directories(L.root / "compose");
    write_text((L.root / "compose" / "reassembly.csv").string(), csv.str());
    auto text = detail::dump(report, 1) + "\n";
    write_text((L.root / "compose" / "reassembly.json").string(), text);
    return text;
  });
}

std::string cmd_all(const PipelineConfig& cfg) {
  validate(cfg);
  cmd_gen(cfg);
  cmd_render(cfg);
  cmd_segment(cfg, SegmentMode::seeded);
  auto eval = json::parse(cmd_eval(cfg));
  cmd_complete(cfg, completer_from_string(cfg.completer));
  cmd_carve(cfg);
  auto compose = json::parse(cmd_compose(cfg));
  Layout L{cfg.output_dir};
  auto completion = json::parse(read_text((L.root / "completions" / "summary.json").string()));
  compose.erase("assets");
  json summary{{"format", "partbench.summary"},
               {"version", 1},
               {"dataset_size", cfg.dataset_size},
               {"seed", cfg.seed},
               {"completer", cfg.completer},
               {"segmentation", eval},
               {"completion", completion},
               {"reassembly", compose}};
  auto text = detail::dump(summary, 1) + "\n";
  write_text((L.root / "summary.json").string(), text);
  return text;
}

}  // namespace partbench
