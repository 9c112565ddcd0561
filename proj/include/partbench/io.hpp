#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "partbench/image.hpp"

namespace partbench {

// 8-bit RGB PNG; values are clamped to [0,1] and rounded to the nearest of 256 levels.
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);
// 1-bit grayscale PNG.
void write_mask_png(const std::string& path, const Mask& m);
Mask read_mask_png(const std::string& path);

// Rounds to the 8-bit levels a PNG round trip would produce.
Image quantize8(const Image& img);

// Little-endian float32 PFM (grayscale). +inf is stored as 1e30 and restored on read.
inline constexpr float kPfmInfinity = 1e30f;
void write_pfm(const std::string& path, const DepthMap& depth);
DepthMap read_pfm(const std::string& path);

// Row-major run lengths, alternating background/foreground and starting with background.
struct Rle {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;
};
Rle rle_encode(const Mask& m);
Mask rle_decode(const Rle& r);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::vector<std::uint8_t> read_bytes(const std::string& path);
void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace partbench
