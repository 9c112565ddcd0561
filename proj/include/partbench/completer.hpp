#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partbench/image.hpp"

namespace partbench {

// Conditioning for p(J | I*M, I, M).
struct CompletionRequest {
  Image masked_image;   // I * M, zero outside M
  Image context_image;  // I
  Mask mask;            // M
  int tile_height = 0;
  int tile_width = 0;
  std::uint64_t seed = 0;
};

// Builds a request from the full multi-view image and a part mask.
CompletionRequest make_request(const Image& context, const Mask& mask, int tile_height, int tile_width,
                               std::uint64_t seed = 0);

struct CompletionResult {
  Image part_image;  // J
  Mask foreground;
  std::string completer;
  std::uint64_t seed = 0;
  bool no_evidence = false;
};

// Ground-truth part render, verbatim. Throws Error("missing-ground-truth").
CompletionResult complete_oracle(const CompletionRequest& req, const std::optional<Image>& gt_part_views,
                                 const std::optional<Mask>& gt_part_foreground);

// J = I * M.
CompletionResult complete_passthrough(const CompletionRequest& req);

// Per tile: occluded pixels (foreground in I, outside M) whose mirror across the tile's vertical
// axis is visible take the mirrored colour; occluded pixels lying between estimated part pixels
// on the same row take the colour of the nearest visible part pixel. Pixels in M are untouched.
CompletionResult complete_symmetry(const CompletionRequest& req);

enum class CompleterKind { oracle, passthrough, symmetry };
std::string_view to_string(CompleterKind k);
CompleterKind completer_from_string(std::string_view s);

inline constexpr int kLatentFactor = 8;
inline constexpr int kConditioningChannels = 25;
inline constexpr std::uint16_t kConditioningVersion = 1;

// Channel layout: 0-7 noise slot (zeros), 8-15 pseudo-latent of I*M, 16-23 pseudo-latent of I,
// 24 mask coverage. A pseudo-latent is the 8x8 average-pooled RGB in its first three channels and
// zeros in the other five.
struct ConditioningBlock {
  int channels = kConditioningChannels;
  int height = 0;
  int width = 0;
  std::vector<float> data;  // (channel, row, col), C order

  float at(int ch, int r, int c) const {
    return data[(static_cast<std::size_t>(ch) * height + r) * width + c];
  }
};

// Throws Error("bad-resolution") unless both grid dimensions are divisible by 8.
ConditioningBlock pack_conditioning(const CompletionRequest& req);

// 16-byte header: "PBCB", u16 version, u16 channels, u32 height, u32 width; then little-endian float32.
std::vector<std::uint8_t> serialize_conditioning(const ConditioningBlock& block);
ConditioningBlock parse_conditioning(const std::vector<std::uint8_t>& bytes);

// Role of each channel in the layout above, e.g. "noise", "masked.r", "context.pad", "mask".
std::string conditioning_channel_role(int channel);

}  // namespace partbench
