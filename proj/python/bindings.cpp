#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "partbench/error.hpp"
#include "partbench/metrics.hpp"
#include "partbench/pipeline.hpp"
#include "partbench/segmap.hpp"

namespace py = pybind11;
using namespace partbench;

namespace {

using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;
using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Mask to_mask(const BoolArray& a) {
  if (a.ndim() != 2) throw py::value_error("mask must be a 2-D array");
  auto v = a.unchecked<2>();
  Mask m(static_cast<int>(v.shape(0)), static_cast<int>(v.shape(1)));
  for (py::ssize_t r = 0; r < v.shape(0); ++r)
    for (py::ssize_t c = 0; c < v.shape(1); ++c)
      if (v(r, c)) m.set(static_cast<int>(r), static_cast<int>(c));
  return m;
}

BoolArray from_mask(const Mask& m) {
  BoolArray a({m.height(), m.width()});
  auto v = a.mutable_unchecked<2>();
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c) v(r, c) = m.get(r, c);
  return a;
}

std::vector<Mask> to_masks(const std::vector<BoolArray>& list) {
  std::vector<Mask> out;
  for (const auto& a : list) out.push_back(to_mask(a));
  return out;
}

py::list from_masks(const std::vector<Mask>& masks) {
  py::list out;
  for (const auto& m : masks) out.append(from_mask(m));
  return out;
}

FloatArray from_image(const Image& img) {
  FloatArray a({img.height, img.width, 3});
  std::copy(img.data.begin(), img.data.end(), a.mutable_data());
  return a;
}

Image to_image(const FloatArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("image must have shape (h, w, 3)");
  Image img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + img.data.size(), img.data.begin());
  return img;
}

PipelineConfig config_of(const std::string& json) {
  auto cfg = config_from_json(json);
  validate(cfg);
  return cfg;
}

PyObject* error_type = nullptr;

void translate(std::exception_ptr p) {
  try {
    if (p) std::rethrow_exception(p);
  } catch (const Error& e) {
    py::object exc = py::handle(error_type)(e.what());
    exc.attr("code") = e.code();
    PyErr_SetObject(error_type, exc.ptr());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Part-level segmentation, completion and reassembly benchmark";

  // partbench.Error carries the machine-readable failure code as .code.
  error_type = PyErr_NewException("partbench._core.Error", PyExc_RuntimeError, nullptr);
  m.attr("Error") = py::handle(error_type);
  py::register_exception_translator(translate);

  m.def("default_config", [] { return config_to_json(PipelineConfig{}); }, "Default configuration as JSON text.");
  m.def("normalize_config", [](const std::string& json) { return config_to_json(config_of(json)); },
        "Validate a JSON configuration and return it with defaults filled in.");

  m.def("generate_asset", [](std::uint64_t seed) { return asset_to_json(generate_asset(seed)); },
        "Generate one filtered, normalized asset and return it as JSON text.", py::arg("seed"));
  m.def(
      "render",
      [](const std::string& asset_json, int tile_size, double fov, double distance_factor) {
        PipelineConfig cfg;
        cfg.tile_size = tile_size;
        cfg.fov = fov;
        cfg.distance_factor = distance_factor;
        auto asset = asset_from_json(asset_json);
        auto b = render_views(asset, pipeline_rig(cfg, asset));
        py::dict out;
        out["rgb"] = from_image(b.rgb);
        out["foreground"] = from_mask(b.foreground);
        out["part_masks"] = from_masks(b.part_masks);
        py::list depth;
        for (const auto& d : b.part_depth) {
          FloatArray a({d.height, d.width});
          std::copy(d.data.begin(), d.data.end(), a.mutable_data());
          depth.append(a);
        }
        out["part_depth"] = depth;
        return out;
      },
      "Render the four-view grid of an asset.", py::arg("asset_json"), py::arg("tile_size") = kDefaultTile,
      py::arg("fov") = kDefaultFov, py::arg("distance_factor") = kDefaultDistanceFactor);

  m.def("iou", [](const BoolArray& a, const BoolArray& b) { return iou(to_mask(a), to_mask(b)); }, py::arg("a"),
        py::arg("b"));
  m.def(
      "greedy_match",
      [](const std::vector<BoolArray>& ranked, const std::vector<BoolArray>& gt, double tau) {
        return greedy_match(to_masks(ranked), to_masks(gt), tau).labels;
      },
      "Label each ranked proposal 1 (true positive) or 0.", py::arg("ranked"), py::arg("gt"), py::arg("tau"));
  m.def(
      "average_precision",
      [](const std::vector<int>& labels, int gt_count) {
        MatchResult r;
        r.labels = labels;
        return average_precision(r, gt_count);
      },
      py::arg("labels"), py::arg("gt_count"));
  m.def(
      "recall_at_k",
      [](const std::vector<BoolArray>& ranked, const std::vector<BoolArray>& gt, double tau, int k) {
        return recall_at_k(to_masks(ranked), to_masks(gt), tau, k);
      },
      py::arg("ranked"), py::arg("gt"), py::arg("tau"), py::arg("k"));

  m.def(
      "rank_and_dedup",
      [](const std::vector<BoolArray>& masks, std::optional<std::vector<double>> scores) {
        auto ms = to_masks(masks);
        RankedProposals r;
        if (scores) {
          r = rank_and_dedup(ms, *scores);
        } else {
          ProposalSet set;
          for (std::size_t i = 0; i < ms.size(); ++i) set.proposals.push_back({ms[i], 0, static_cast<int>(i)});
          r = rank_and_dedup(set);
        }
        return py::make_tuple(from_masks(r.masks), r.scores, r.source);
      },
      "Rank proposals (by reliability when no scores are given) and drop near-duplicates. Returns "
      "(masks, scores, source indices).",
      py::arg("masks"), py::arg("scores") = py::none());

  m.def(
      "encode_segmap",
      [](const std::vector<BoolArray>& masks, int palette_size, std::uint64_t perm_seed) {
        auto palette = make_palette(palette_size);
        return from_image(encode_segmap(to_masks(masks), palette, random_permutation(palette_size, perm_seed)));
      },
      py::arg("masks"), py::arg("palette_size") = 16, py::arg("perm_seed") = 0);
  m.def(
      "decode_segmap",
      [](const FloatArray& segmap, int palette_size, int min_pixels) {
        return from_masks(decode_segmap(to_image(segmap), make_palette(palette_size), min_pixels).masks);
      },
      py::arg("segmap"), py::arg("palette_size") = 16, py::arg("min_pixels") = kDefaultMinPixels);

  m.def("gen", [](const std::string& cfg) { cmd_gen(config_of(cfg)); }, py::arg("config_json"));
  m.def("render_stage", [](const std::string& cfg) { cmd_render(config_of(cfg)); }, py::arg("config_json"));
  m.def(
      "segment",
      [](const std::string& cfg, const std::string& mode) {
        if (mode != "auto" && mode != "seeded") throw py::value_error("mode must be 'auto' or 'seeded'");
        cmd_segment(config_of(cfg), mode == "auto" ? SegmentMode::automatic : SegmentMode::seeded);
      },
      py::arg("config_json"), py::arg("mode") = "auto");
  m.def("evaluate", [](const std::string& cfg) { return cmd_eval(config_of(cfg)); }, py::arg("config_json"));
  m.def(
      "complete",
      [](const std::string& cfg, const std::string& completer) {
        cmd_complete(config_of(cfg), completer_from_string(completer));
      },
      py::arg("config_json"), py::arg("completer") = "oracle");
  m.def("carve", [](const std::string& cfg) { cmd_carve(config_of(cfg)); }, py::arg("config_json"));
  m.def("compose", [](const std::string& cfg) { return cmd_compose(config_of(cfg)); }, py::arg("config_json"));
  m.def("run_all", [](const std::string& cfg) { return cmd_all(config_of(cfg)); },
        "Run every stage and return the summary JSON.", py::arg("config_json"));
}
