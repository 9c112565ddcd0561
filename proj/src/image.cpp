#include "partbench/image.hpp"

#include <cassert>

namespace partbench {

Mask& Mask::operator|=(const Mask& o) {
  assert(words_.size() == o.words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

Mask& Mask::operator&=(const Mask& o) {
  assert(words_.size() == o.words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

Mask Mask::operator~() const {
  Mask r = *this;
  for (auto& w : r.words_) w = ~w;
  auto tail = size() & 63;
  if (tail && !r.words_.empty()) r.words_.back() &= (std::uint64_t{1} << tail) - 1;
  return r;
}

Mask operator|(Mask a, const Mask& b) { return a |= b; }
Mask operator&(Mask a, const Mask& b) { return a &= b; }

std::size_t intersection_count(const Mask& a, const Mask& b) {
  const auto& wa = a.words();
  const auto& wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) n += std::popcount(wa[i] & wb[i]);
  return n;
}

std::size_t union_count(const Mask& a, const Mask& b) {
  const auto& wa = a.words();
  const auto& wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) n += std::popcount(wa[i] | wb[i]);
  return n;
}

namespace {

// Separable min/max filter with a (2r+1) square window; `grow` selects dilation.
Mask morph(const Mask& m, int radius, bool grow) {
  if (radius <= 0) return m;
  const int h = m.height(), w = m.width();
  Mask rows(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      bool v = !grow;
      for (int d = -radius; d <= radius; ++d) {
        int cc = c + d;
        bool s = (cc >= 0 && cc < w) ? m.get(r, cc) : false;
        if (grow ? s : !s) {
          v = grow;
          break;
        }
      }
      rows.set(r, c, v);
    }
  Mask out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      bool v = !grow;
      for (int d = -radius; d <= radius; ++d) {
        int rr = r + d;
        bool s = (rr >= 0 && rr < h) ? rows.get(rr, c) : false;
        if (grow ? s : !s) {
          v = grow;
          break;
        }
      }
      out.set(r, c, v);
    }
  return out;
}

}  // namespace

Mask dilate(const Mask& m, int radius) { return morph(m, radius, true); }
Mask erode(const Mask& m, int radius) { return morph(m, radius, false); }

bool adjacent(const Mask& a, const Mask& b) {
  const int h = a.height(), w = a.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!a.get(r, c)) continue;
      if (b.get(r, c)) return true;
      if (r > 0 && b.get(r - 1, c)) return true;
      if (r + 1 < h && b.get(r + 1, c)) return true;
      if (c > 0 && b.get(r, c - 1)) return true;
      if (c + 1 < w && b.get(r, c + 1)) return true;
    }
  return false;
}

Image apply_mask(const Image& img, const Mask& m) {
  Image out(img.height, img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      if (m.get(r, c)) out.set(r, c, img.get(r, c));
  return out;
}

Mask nonzero_mask(const Image& img) {
  Mask m(img.height, img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      auto v = img.get(r, c);
      if (v[0] != 0 || v[1] != 0 || v[2] != 0) m.set(r, c);
    }
  return m;
}

}  // namespace partbench
