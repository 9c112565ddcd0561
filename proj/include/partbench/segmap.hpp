#pragma once

#include <cstdint>
#include <vector>

#include "partbench/image.hpp"

namespace partbench {

inline constexpr int kDefaultPaletteSize = 16;
inline constexpr int kDefaultMinPixels = 10;
inline constexpr double kPaletteSpacing = 0.25;

struct Palette {
  std::vector<Rgb> colors;

  int size() const { return static_cast<int>(colors.size()); }
};

// Farthest-point sampling on the {0, .25, .5, .75, 1}^3 lattice, seeded from black (the reserved
// background colour). The seed only orders ties. Throws Error("invalid-palette-size") unless 2 <= Q <= 64.
Palette make_palette(int q, std::uint64_t seed = 0);

// Uniform random permutation of {0..q-1}.
std::vector<int> random_permutation(int q, std::uint64_t seed);

// Paints mask k with palette colour perm[k]; background stays black.
// Throws Error("too-many-parts") if there are more masks than colours and Error("overlapping-masks").
Image encode_segmap(const std::vector<Mask>& masks, const Palette& palette, const std::vector<int>& perm);

struct DecodedSegmap {
  std::vector<Mask> masks;         // ordered by palette index
  std::vector<int> palette_index;  // colour each mask was decoded from
};

// Nearest palette colour per pixel (L2 in RGB, black = background); colours covering fewer than
// min_pixels pixels are dropped.
DecodedSegmap decode_segmap(const Image& segmap, const Palette& palette, int min_pixels = kDefaultMinPixels);

}  // namespace partbench
