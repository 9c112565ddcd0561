#include "partbench/segmap.hpp"

#include <numeric>

#include "partbench/error.hpp"
#include "partbench/rng.hpp"

namespace partbench {

namespace {

double distance2(const Rgb& a, const Rgb& b) {
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

Palette make_palette(int q, std::uint64_t seed) {
  if (q < 2 || q > 64) throw Error("invalid-palette-size", "Q must lie in [2, 64]");
  std::vector<Rgb> lattice;
  for (int r = 0; r <= 4; ++r)
    for (int g = 0; g <= 4; ++g)
      for (int b = 0; b <= 4; ++b)
        if (r || g || b)
          lattice.push_back({static_cast<float>(r * kPaletteSpacing), static_cast<float>(g * kPaletteSpacing),
                             static_cast<float>(b * kPaletteSpacing)});
  Rng rng(mix_seed(seed, 0x70616c));
  for (std::size_t i = lattice.size() - 1; i > 0; --i)
    std::swap(lattice[i], lattice[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i)))]);

  // Distances are multiples of 1/16, so the comparisons below are exact.
  std::vector<double> nearest(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) nearest[i] = distance2(lattice[i], {0, 0, 0});
  std::vector<bool> taken(lattice.size(), false);
  Palette p;
  while (p.size() < q) {
    std::size_t pick = lattice.size();
    for (std::size_t i = 0; i < lattice.size(); ++i)
      if (!taken[i] && (pick == lattice.size() || nearest[i] > nearest[pick])) pick = i;
    taken[pick] = true;
    p.colors.push_back(lattice[pick]);
    for (std::size_t i = 0; i < lattice.size(); ++i) nearest[i] = std::min(nearest[i], distance2(lattice[i], lattice[pick]));
  }
  return p;
}

std::vector<int> random_permutation(int q, std::uint64_t seed) {
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(mix_seed(seed, 0x7065726d));
  for (int i = q - 1; i > 0; --i) std::swap(perm[i], perm[rng.integer(0, i)]);
  return perm;
}

Image encode_segmap(const std::vector<Mask>& masks, const Palette& palette, const std::vector<int>& perm) {
  if (masks.size() > palette.colors.size()) throw Error("too-many-parts", "more parts than palette colours");
  if (perm.size() < masks.size()) throw Error("invalid-argument", "permutation shorter than the part list");
  if (masks.empty()) return {};
  const int h = masks[0].height(), w = masks[0].width();
  Mask seen(h, w);
  for (const auto& m : masks) {
    if (m.height() != h || m.width() != w) throw Error("size-mismatch", "masks differ in resolution");
    if (intersection_count(seen, m) != 0) throw Error("overlapping-masks");
    seen |= m;
  }
  Image out(h, w);
  for (std::size_t k = 0; k < masks.size(); ++k) {
    auto idx = perm[k];
    if (idx < 0 || idx >= palette.size()) throw Error("invalid-argument", "permutation entry outside the palette");
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        if (masks[k].get(r, c)) out.set(r, c, palette.colors[idx]);
  }
  return out;
}

DecodedSegmap decode_segmap(const Image& segmap, const Palette& palette, int min_pixels) {
  const int q = palette.size();
  std::vector<Mask> per_colour(q, Mask(segmap.height, segmap.width));
  for (int r = 0; r < segmap.height; ++r)
    for (int c = 0; c < segmap.width; ++c) {
      auto v = segmap.get(r, c);
      int best = -1;
      double best_d = distance2(v, {0, 0, 0});
      for (int k = 0; k < q; ++k) {
        auto d = distance2(v, palette.colors[k]);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best >= 0) per_colour[best].set(r, c);
    }
  DecodedSegmap out;
  for (int k = 0; k < q; ++k) {
    auto n = per_colour[k].count();
    if (n == 0 || n < static_cast<std::size_t>(min_pixels)) continue;
    out.masks.push_back(std::move(per_colour[k]));
    out.palette_index.push_back(k);
  }
  return out;
}

}  // namespace partbench
