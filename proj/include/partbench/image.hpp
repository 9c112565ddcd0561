#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

namespace partbench {

using Rgb = std::array<float, 3>;

// Interleaved RGB float image, row-major.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<float> data;

  Image() = default;
  Image(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0.0f) {}

  std::size_t index(int r, int c) const { return (static_cast<std::size_t>(r) * width + c) * 3; }
  Rgb get(int r, int c) const {
    auto i = index(r, c);
    return {data[i], data[i + 1], data[i + 2]};
  }
  void set(int r, int c, Rgb v) {
    auto i = index(r, c);
    data[i] = v[0];
    data[i + 1] = v[1];
    data[i + 2] = v[2];
  }
  bool operator==(const Image&) const = default;
};

// Per-pixel depth along the camera ray; +inf marks a miss.
struct DepthMap {
  int height = 0;
  int width = 0;
  std::vector<float> data;

  DepthMap() = default;
  DepthMap(int h, int w)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, std::numeric_limits<float>::infinity()) {}

  float get(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
  void set(int r, int c, float v) { data[static_cast<std::size_t>(r) * width + c] = v; }
};

// Bit-packed binary mask, row-major. Bits past height*width are kept zero.
class Mask {
 public:
  Mask() = default;
  Mask(int h, int w) : height_(h), width_(w), words_((static_cast<std::size_t>(h) * w + 63) / 64, 0) {}

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return static_cast<std::size_t>(height_) * width_; }

  bool get(int r, int c) const { return get(static_cast<std::size_t>(r) * width_ + c); }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(int r, int c, bool v = true) { set(static_cast<std::size_t>(r) * width_ + c, v); }
  void set(std::size_t i, bool v = true) {
    auto bit = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  Mask& operator|=(const Mask& o);
  Mask& operator&=(const Mask& o);
  Mask operator~() const;
  bool operator==(const Mask&) const = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint64_t> words_;
};

Mask operator|(Mask a, const Mask& b);
Mask operator&(Mask a, const Mask& b);
std::size_t intersection_count(const Mask& a, const Mask& b);
std::size_t union_count(const Mask& a, const Mask& b);

// Square (Chebyshev) structuring element; radius 0 is the identity.
Mask dilate(const Mask& m, int radius);
Mask erode(const Mask& m, int radius);

// 4-connected contact between two masks (touching or overlapping).
bool adjacent(const Mask& a, const Mask& b);

// Pixel-wise a*mask; zero elsewhere.
Image apply_mask(const Image& img, const Mask& m);
// Pixels with any non-zero channel.
Mask nonzero_mask(const Image& img);

// Multi-view grid helpers: four tiles of tile_h x tile_w arranged 2x2, row-major.
struct TileOrigin {
  int row;
  int col;
};
inline TileOrigin tile_origin(int tile, int tile_h, int tile_w) { return {(tile / 2) * tile_h, (tile % 2) * tile_w}; }

}  // namespace partbench
