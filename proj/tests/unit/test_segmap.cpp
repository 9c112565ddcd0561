#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "partbench/error.hpp"
#include "partbench/render.hpp"
#include "partbench/segmap.hpp"

using namespace partbench;
using namespace testing;

namespace {

double linf(Rgb a, Rgb b) {
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

std::set<std::vector<std::uint64_t>> as_set(const std::vector<Mask>& ms) {
  std::set<std::vector<std::uint64_t>> s;
  for (const auto& m : ms) s.insert(m.words());
  return s;
}

}  // namespace

TEST_CASE("palette") {
  auto p2 = make_palette(2, 0);
  CHECK(linf(p2.colors[0], p2.colors[1]) >= 0.9);
  for (int q : {2, 10, 16, 64}) {
    auto p = make_palette(q, 3);
    REQUIRE(p.size() == q);
    for (int i = 0; i < q; ++i) {
      CHECK(linf(p.colors[i], {0, 0, 0}) > 0);
      for (int j = i + 1; j < q; ++j) CHECK(linf(p.colors[i], p.colors[j]) >= 0.25 - 1e-9);
    }
  }
  CHECK(make_palette(16, 5).colors == make_palette(16, 5).colors);
  CHECK_THROWS_AS(make_palette(1, 0), Error);
  CHECK_THROWS_AS(make_palette(65, 0), Error);
}

TEST_CASE("encode") {
  auto palette = make_palette(4, 0);
  auto a = rect_mask(8, 8, 0, 0, 4, 4), b = rect_mask(8, 8, 4, 4, 8, 8);
  auto perm = std::vector<int>{0, 1, 2, 3};
  auto img = encode_segmap({a, b}, palette, perm);
  std::set<Rgb> colours;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) colours.insert(img.get(r, c));
  CHECK(colours.size() == 3);
  CHECK(img.get(0, 0) == palette.colors[0]);
  auto swapped = encode_segmap({a, b}, palette, {1, 0, 2, 3});
  CHECK(swapped.get(0, 0) == palette.colors[1]);
  CHECK(swapped.get(7, 7) == palette.colors[0]);
  std::vector<Mask> five(5, Mask(8, 8));
  CHECK_THROWS_AS(encode_segmap(five, palette, perm), Error);
}

TEST_CASE("decode") {
  auto palette = make_palette(8, 0);
  auto big = rect_mask(10, 10, 0, 0, 5, 5), small = rect_mask(10, 10, 8, 8, 9, 10);
  std::vector<int> perm{3, 1, 0, 2, 4, 5, 6, 7};
  auto img = encode_segmap({big, small}, palette, perm);
  auto dec = decode_segmap(img, palette, 10);
  REQUIRE(dec.masks.size() == 1);  // the 2-pixel part is culled
  CHECK(dec.masks[0] == big);
  CHECK(decode_segmap(img, palette, 0).masks.size() == 2);

  // Uniform noise well inside the palette margin leaves the decode unchanged.
  Rng rng(9);
  auto noisy = img;
  for (auto& v : noisy.data) v = std::clamp(v + static_cast<float>(rng.uniform(-0.05, 0.05)), 0.0f, 1.0f);
  auto dn = decode_segmap(noisy, palette, 0);
  CHECK(as_set(dn.masks) == as_set({big, small}));
}

TEST_CASE("decode totality") {
  auto palette = make_palette(16, 0);
  Rng rng(3);
  Image img(12, 12);
  for (auto& v : img.data) v = static_cast<float>(rng.uniform());
  auto d = decode_segmap(img, palette, 0);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 12; ++c) {
      int hits = 0;
      for (const auto& m : d.masks) hits += m.get(r, c);
      CHECK(hits <= 1);
    }
}

TEST_CASE("round trip and naming invariance on rendered assets") {
  auto palette = make_palette(16, 0);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto a = generate_asset(seed);
    auto b = render_views(a, make_rig(32, 32, 2.7, 40));
    std::vector<Mask> kept;
    for (const auto& m : b.part_masks)
      if (m.count() >= 10) kept.push_back(m);
    auto reference = as_set(kept);
    for (int t = 0; t < 4; ++t) {
      auto perm = random_permutation(16, seed * 100 + t);
      auto dec = decode_segmap(encode_segmap(b.part_masks, palette, perm), palette, 10);
      CHECK(as_set(dec.masks) == reference);
    }
  }
}

TEST_CASE("random permutation") {
  auto p = random_permutation(16, 4);
  auto s = p;
  std::sort(s.begin(), s.end());
  for (int i = 0; i < 16; ++i) CHECK(s[i] == i);
  CHECK(random_permutation(16, 4) == p);
}
