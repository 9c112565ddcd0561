#include "partbench/completer.hpp"

#include <algorithm>
#include <cstdlib>

#include "bytes.hpp"
#include "partbench/error.hpp"

namespace partbench {

CompletionRequest make_request(const Image& context, const Mask& mask, int tile_height, int tile_width,
                               std::uint64_t seed) {
  if (mask.height() != context.height || mask.width() != context.width)
    throw Error("size-mismatch", "mask and image differ in resolution");
  return {apply_mask(context, mask), context, mask, tile_height, tile_width, seed};
}

CompletionResult complete_oracle(const CompletionRequest& req, const std::optional<Image>& gt_part_views,
                                 const std::optional<Mask>& gt_part_foreground) {
  if (!gt_part_views) throw Error("missing-ground-truth", "oracle completion needs the part render");
  return {*gt_part_views, gt_part_foreground ? *gt_part_foreground : nonzero_mask(*gt_part_views), "oracle", req.seed,
          req.mask.empty()};
}

CompletionResult complete_passthrough(const CompletionRequest& req) {
  return {req.masked_image, req.mask, "passthrough", req.seed, req.mask.empty()};
}

CompletionResult complete_symmetry(const CompletionRequest& req) {
  CompletionResult out{req.masked_image, req.mask, "symmetry", req.seed, false};
  if (req.mask.empty()) {
    out.no_evidence = true;
    return out;
  }
  const auto context_fg = nonzero_mask(req.context_image);
  const int th = req.tile_height, tw = req.tile_width;
  std::vector<int> visible;
  for (int tile = 0; tile < 4; ++tile) {
    auto o = tile_origin(tile, th, tw);
    for (int r = o.row; r < o.row + th; ++r) {
      auto occluded = [&](int c) { return !out.foreground.get(r, c) && context_fg.get(r, c); };
      for (int c = 0; c < tw; ++c) {
        int cc = o.col + c, mirror = o.col + tw - 1 - c;
        if (occluded(cc) && req.mask.get(r, mirror)) {
          out.part_image.set(r, cc, req.masked_image.get(r, mirror));
          out.foreground.set(r, cc);
        }
      }
      int lo = -1, hi = -1;
      visible.clear();
      for (int c = o.col; c < o.col + tw; ++c) {
        if (out.foreground.get(r, c)) {
          if (lo < 0) lo = c;
          hi = c;
        }
        if (req.mask.get(r, c)) visible.push_back(c);
      }
      if (lo < 0 || visible.empty()) continue;
      for (int c = lo; c <= hi; ++c) {
        if (!occluded(c)) continue;
        // Nearest visible pixel of the part on this row; the left one wins ties.
        auto it = std::lower_bound(visible.begin(), visible.end(), c);
        int pick = it == visible.end() ? visible.back() : *it;
        if (it != visible.begin() && (it == visible.end() || c - *(it - 1) <= *it - c)) pick = *(it - 1);
        out.part_image.set(r, c, req.masked_image.get(r, pick));
        out.foreground.set(r, c);
      }
    }
  }
  return out;
}

std::string_view to_string(CompleterKind k) {
  switch (k) {
    case CompleterKind::oracle: return "oracle";
    case CompleterKind::passthrough: return "passthrough";
    case CompleterKind::symmetry: return "symmetry";
  }
  return "?";
}

CompleterKind completer_from_string(std::string_view s) {
  for (auto k : {CompleterKind::oracle, CompleterKind::passthrough, CompleterKind::symmetry})
    if (to_string(k) == s) return k;
  throw Error("invalid-argument", "unknown completer '" + std::string(s) + "'");
}

ConditioningBlock pack_conditioning(const CompletionRequest& req) {
  const int gh = req.context_image.height, gw = req.context_image.width;
  if (gh % kLatentFactor || gw % kLatentFactor || gh == 0 || gw == 0)
    throw Error("bad-resolution", "grid size must be a positive multiple of 8");
  if (req.masked_image.height != gh || req.masked_image.width != gw || req.mask.height() != gh || req.mask.width() != gw)
    throw Error("size-mismatch", "request images differ in resolution");
  ConditioningBlock b;
  b.height = gh / kLatentFactor;
  b.width = gw / kLatentFactor;
  b.data.assign(static_cast<std::size_t>(kConditioningChannels) * b.height * b.width, 0.0f);
  auto put = [&](int ch, int r, int c, double v) {
    b.data[(static_cast<std::size_t>(ch) * b.height + r) * b.width + c] = static_cast<float>(v);
  };
  constexpr double inv = 1.0 / (kLatentFactor * kLatentFactor);
  for (int r = 0; r < b.height; ++r)
    for (int c = 0; c < b.width; ++c) {
      double masked[3] = {0, 0, 0}, context[3] = {0, 0, 0}, coverage = 0;
      for (int dr = 0; dr < kLatentFactor; ++dr)
        for (int dc = 0; dc < kLatentFactor; ++dc) {
          int rr = r * kLatentFactor + dr, cc = c * kLatentFactor + dc;
          auto m = req.masked_image.get(rr, cc), x = req.context_image.get(rr, cc);
          for (int ch = 0; ch < 3; ++ch) {
            masked[ch] += m[ch];
            context[ch] += x[ch];
          }
          coverage += req.mask.get(rr, cc) ? 1.0 : 0.0;
        }
      for (int ch = 0; ch < 3; ++ch) {
        put(8 + ch, r, c, masked[ch] * inv);
        put(16 + ch, r, c, context[ch] * inv);
      }
      put(24, r, c, coverage * inv);
    }
  return b;
}

std::vector<std::uint8_t> serialize_conditioning(const ConditioningBlock& block) {
  detail::ByteWriter w;
  w.raw("PBCB", 4);
  w.u16(kConditioningVersion);
  w.u16(static_cast<std::uint16_t>(block.channels));
  w.u32(static_cast<std::uint32_t>(block.height));
  w.u32(static_cast<std::uint32_t>(block.width));
  for (auto v : block.data) w.f32(v);
  return w.take();
}

ConditioningBlock parse_conditioning(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes);
  if (!r.magic("PBCB", 4)) throw Error("bad-format", "not a conditioning block");
  if (r.u16() != kConditioningVersion) throw Error("bad-format", "unsupported conditioning version");
  ConditioningBlock b;
  b.channels = r.u16();
  b.height = static_cast<int>(r.u32());
  b.width = static_cast<int>(r.u32());
  if (b.channels != kConditioningChannels) throw Error("bad-format", "unexpected channel count");
  auto n = static_cast<std::size_t>(b.channels) * b.height * b.width;
  if (r.remaining() != n * 4) throw Error("bad-format", "payload size does not match the header");
  b.data.resize(n);
  for (auto& v : b.data) v = r.f32();
  return b;
}

std::string conditioning_channel_role(int channel) {
  static const char* rgb[] = {"r", "g", "b"};
  if (channel < 0 || channel >= kConditioningChannels) throw Error("invalid-argument", "channel out of range");
  if (channel < 8) return "noise";
  if (channel == 24) return "mask";
  std::string group = channel < 16 ? "masked" : "context";
  int local = channel % 8;
  return group + "." + (local < 3 ? rgb[local] : "pad");
}

}  // namespace partbench
