#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "partbench/error.hpp"
#include "partbench/io.hpp"

using namespace partbench;
using namespace testing;

TEST_CASE("png round trip of 8-bit values") {
  auto dir = scratch_dir("png");
  Image img(5, 7);
  Rng rng(1);
  for (auto& v : img.data) v = static_cast<float>(rng.integer(0, 255)) / 255.0f;
  write_png((dir / "a.png").string(), img);
  auto back = read_png((dir / "a.png").string());
  CHECK(back == img);
  CHECK(quantize8(img) == img);
  CHECK_THROWS_AS(read_png((dir / "missing.png").string()), Error);
}

TEST_CASE("mask png and rle round trip") {
  auto dir = scratch_dir("mask");
  Rng rng(2);
  for (double p : {0.0, 0.3, 1.0}) {
    auto m = random_mask(13, 29, p, rng);
    write_mask_png((dir / "m.png").string(), m);
    CHECK(read_mask_png((dir / "m.png").string()) == m);
    auto rle = rle_encode(m);
    CHECK(rle_decode(rle) == m);
    std::uint32_t sum = 0;
    for (auto c : rle.counts) sum += c;
    CHECK(sum == 13 * 29);
  }
  auto r = rle_encode(rect_mask(2, 3, 0, 1, 1, 3));
  CHECK(r.counts == std::vector<std::uint32_t>{1, 2, 3});
  Rle bad{2, 2, {1, 1}};
  CHECK_THROWS_AS(rle_decode(bad), Error);
}

TEST_CASE("pfm round trip with infinity") {
  auto dir = scratch_dir("pfm");
  DepthMap d(3, 4);
  d.set(0, 0, 1.5f);
  d.set(2, 3, 0.25f);
  write_pfm((dir / "d.pfm").string(), d);
  auto bytes = read_bytes((dir / "d.pfm").string());
  std::string head(bytes.begin(), bytes.begin() + 3);
  CHECK(head == "Pf\n");
  auto back = read_pfm((dir / "d.pfm").string());
  CHECK(back.get(0, 0) == 1.5f);
  CHECK(back.get(2, 3) == 0.25f);
  CHECK(std::isinf(back.get(1, 1)));
}
