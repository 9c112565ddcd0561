#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "partbench/completer.hpp"
#include "partbench/composer.hpp"
#include "partbench/field.hpp"
#include "partbench/proposer.hpp"
#include "partbench/render.hpp"
#include "partbench/scene.hpp"

namespace partbench {

inline constexpr int kConfigVersion = 1;

struct PipelineConfig {
  int version = kConfigVersion;
  std::string output_dir = "partbench-out";
  int dataset_size = 20;
  std::uint64_t seed = 0;
  int min_parts = 2;
  int max_parts = 8;
  int tile_size = kDefaultTile;
  double fov = kDefaultFov;
  double distance_factor = kDefaultDistanceFactor;
  int palette_size = 16;
  int min_pixels = 10;
  NoiseSpec noise{0.15, 0.05, 1, 10};
  int max_proposals = 0;  // 0: keep every ranked proposal
  std::vector<double> taus{0.5, 0.75};
  int recall_max_k = 20;
  std::string completer = "oracle";
  double occlusion_threshold = 0.3;
  int carve_resolution = 96;
  double kappa = 50.0;
  double step = 0.0;  // 0: half a voxel
  int novel_views = 4;
  double novel_max_elevation = 40.0;
};

// Throws Error("config-invalid") naming the offending field.
void validate(const PipelineConfig& cfg);
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::string& path);

// Sub-seeds, all derived from cfg.seed.
std::uint64_t asset_seed(const PipelineConfig& cfg, int index);
std::uint64_t sampler_seed(const PipelineConfig& cfg, int index);
std::uint64_t novel_view_seed(const PipelineConfig& cfg, int index);

Rig pipeline_rig(const PipelineConfig& cfg, const Asset& asset);
Aabb carve_bounds(const Asset& asset);
double render_step(const PipelineConfig& cfg, const Asset& asset);

// Ground-truth part masks that are visible somewhere; evaluation ignores fully hidden parts.
std::vector<int> visible_parts(const ViewBundle& bundle);

RankedProposals segment_bundle(const ViewBundle& bundle, const PipelineConfig& cfg, std::uint64_t seed);
RankedProposals cap_proposals(RankedProposals ranked, int max_proposals);

// Point inside the mask: among the pixels of its deepest non-empty erosion, the one closest to their
// centroid (first in row-major order on ties).
std::pair<int, int> seed_point(const Mask& m);

// Pairwise-compatible subset of ranked proposals used as the part decomposition: scanned in rank
// order, a proposal is kept when less than half of it is already covered.
std::vector<Mask> select_assembly_parts(const RankedProposals& ranked);

// Oracle ground truth for a proposal: the gt part with the highest IoU; -1 when none overlaps.
int best_gt_part(const Mask& proposal, const ViewBundle& bundle);

CompletionResult run_completer(CompleterKind kind, const ViewBundle& bundle, const Mask& mask, std::uint64_t seed);

struct CompletionScore {
  int asset = 0;
  int part = 0;
  double occlusion = 0;
  double psnr_oracle = 0;
  double psnr_symmetry = 0;
  double psnr_passthrough = 0;
};
// All three completers on every visible gt part of a bundle; PSNR over the part's full silhouette.
std::vector<CompletionScore> score_completions(const ViewBundle& bundle, int asset_index);

struct ReassemblyReport {
  std::string asset_id;
  int parts = 0;
  std::vector<double> psnr_compositional;  // per novel view
  std::vector<double> psnr_unstructured;
  double mean_compositional = 0;
  double mean_unstructured = 0;
  double delta() const { return mean_compositional - mean_unstructured; }
};

struct ReassemblyArtifacts {
  std::vector<Camera> cameras;
  std::vector<CameraRender> ground_truth;
  std::vector<ComposeRender> compositional;
  std::vector<FieldRender> unstructured;
};

// Novel cameras: azimuth uniform in [0, 360), elevation uniform in [0, max_elevation].
std::vector<Camera> novel_cameras(const PipelineConfig& cfg, const Asset& asset, std::uint64_t seed);

ReassemblyReport evaluate_reassembly(const Asset& asset, const Assembly& assembly, const PartField& unstructured,
                                     const PipelineConfig& cfg, std::uint64_t view_seed,
                                     ReassemblyArtifacts* artifacts = nullptr);

// segment -> complete -> carve -> compose for one asset, in memory.
ReassemblyReport reassembly_report(const Asset& asset, const PipelineConfig& cfg, int asset_index = 0,
                                   ReassemblyArtifacts* artifacts = nullptr);

// File-backed stages. Each reads the previous stage's outputs under cfg.output_dir.
// Missing inputs raise Error("missing-input", path).
enum class SegmentMode { automatic, seeded };

DatasetManifest cmd_gen(const PipelineConfig& cfg);
void cmd_render(const PipelineConfig& cfg);
// external_dir: directory of <asset id>.json proposal files from another segmenter.
void cmd_segment(const PipelineConfig& cfg, SegmentMode mode, const std::optional<std::string>& external_dir = {});
std::string cmd_eval(const PipelineConfig& cfg);
// external_dir: <asset id>/part_<k>.png and part_<k>_mask.png produced by another completer,
// used in place of the built-in one.
void cmd_complete(const PipelineConfig& cfg, CompleterKind kind, const std::optional<std::string>& external_dir = {});
void cmd_carve(const PipelineConfig& cfg);
std::string cmd_compose(const PipelineConfig& cfg);
// Runs every stage; writes and returns summary.json.
std::string cmd_all(const PipelineConfig& cfg);

// Wraps a failure inside a stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace partbench
