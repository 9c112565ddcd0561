#include <doctest.h>

#include "helpers.hpp"
#include "partbench/completer.hpp"
#include "partbench/error.hpp"
#include "partbench/render.hpp"

using namespace partbench;
using namespace testing;

namespace {

ViewBundle occluded_scene() {
  // A wide box partly hidden behind a sphere in front of it.
  auto a = make_asset({box_part({0, 0, -0.2}, {0.6, 0.3, 0.1}), sphere_part({0.25, 0, 0.4}, 0.3)});
  return render_views(a, make_rig(32, 32, 2.7, 40));
}

}  // namespace

TEST_CASE("requests") {
  Image img(8, 8);
  for (auto& v : img.data) v = 0.5f;
  auto m = rect_mask(8, 8, 0, 0, 4, 8);
  auto req = make_request(img, m, 4, 4);
  CHECK(req.masked_image.get(0, 0)[0] == 0.5f);
  CHECK(req.masked_image.get(5, 0)[0] == 0.0f);
  CHECK_THROWS_AS(make_request(img, Mask(4, 4), 2, 2), Error);
}

TEST_CASE("oracle returns the ground truth verbatim") {
  auto b = occluded_scene();
  auto req = make_request(b.rgb, b.part_masks[0], 32, 32);
  auto out = complete_oracle(req, b.part_rgb[0], b.part_silhouette(0));
  CHECK(out.part_image == b.part_rgb[0]);
  CHECK(foreground_psnr(b.part_rgb[0], out.part_image, b.part_silhouette(0)) == kPsnrCap);
  CHECK_THROWS_AS(complete_oracle(req, std::nullopt, std::nullopt), Error);
}

TEST_CASE("passthrough") {
  auto b = occluded_scene();
  auto req = make_request(b.rgb, b.part_masks[0], 32, 32);
  CHECK(complete_passthrough(req).part_image == req.masked_image);
  auto none = complete_passthrough(make_request(b.rgb, Mask(64, 64), 32, 32));
  for (auto v : none.part_image.data) CHECK(v == 0.0f);
  // A fully visible part: passthrough equals the oracle on the whole silhouette.
  auto solo = make_asset({sphere_part({0, 0, 0}, 0.5)});
  auto sb = render_views(solo, make_rig(32, 32, 2.7, 40));
  auto sreq = make_request(sb.rgb, sb.part_masks[0], 32, 32);
  CHECK(complete_passthrough(sreq).part_image == complete_oracle(sreq, sb.part_rgb[0], std::nullopt).part_image);
}

TEST_CASE("symmetry completion") {
  SUBCASE("no occlusion leaves the input unchanged") {
    auto solo = make_asset({sphere_part({0, 0, 0}, 0.5)});
    auto b = render_views(solo, make_rig(32, 32, 2.7, 40));
    auto req = make_request(b.rgb, b.part_masks[0], 32, 32);
    auto out = complete_symmetry(req);
    CHECK(out.part_image == req.masked_image);
    CHECK(out.foreground == req.mask);
  }
  SUBCASE("evidence is preserved and the foreground grows") {
    auto b = occluded_scene();
    auto req = make_request(b.rgb, b.part_masks[0], 32, 32);
    auto out = complete_symmetry(req);
    CHECK(intersection_count(out.foreground, req.mask) == req.mask.count());
    CHECK(out.foreground.count() > req.mask.count());
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c)
        if (req.mask.get(r, c)) REQUIRE(out.part_image.get(r, c) == req.masked_image.get(r, c));
  }
  SUBCASE("mirror beats passthrough on a symmetric occluded part") {
    auto b = occluded_scene();
    auto req = make_request(b.rgb, b.part_masks[0], 32, 32);
    auto sil = b.part_silhouette(0);
    auto sym = foreground_psnr(b.part_rgb[0], complete_symmetry(req).part_image, sil);
    auto pass = foreground_psnr(b.part_rgb[0], complete_passthrough(req).part_image, sil);
    CHECK(sym > pass);
  }
  SUBCASE("no evidence") {
    auto b = occluded_scene();
    auto out = complete_symmetry(make_request(b.rgb, Mask(64, 64), 32, 32));
    CHECK(out.no_evidence);
    CHECK(out.foreground.empty());
  }
  SUBCASE("deterministic") {
    auto b = occluded_scene();
    auto req = make_request(b.rgb, b.part_masks[0], 32, 32, 5);
    CHECK(complete_symmetry(req).part_image == complete_symmetry(req).part_image);
  }
}

TEST_CASE("conditioning block") {
  SUBCASE("1024 squared gives 25 x 128 x 128") {
    Image img(1024, 1024);
    auto req = make_request(img, Mask(1024, 1024), 512, 512);
    auto block = pack_conditioning(req);
    CHECK(block.channels == 25);
    CHECK(block.height == 128);
    CHECK(block.width == 128);
    CHECK(block.data.size() == 25u * 128 * 128);
  }
  SUBCASE("all-black input is zero except the mask channel") {
    Image img(64, 64);
    auto m = rect_mask(64, 64, 0, 0, 16, 64);
    auto block = pack_conditioning(make_request(img, m, 32, 32));
    for (int ch = 0; ch < 24; ++ch)
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) REQUIRE(block.at(ch, r, c) == 0.0f);
    CHECK(block.at(24, 0, 0) == 1.0f);
    CHECK(block.at(24, 3, 0) == 0.0f);
  }
  SUBCASE("pooled channels") {
    Image img(16, 16);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) img.set(r, c, {c < 8 ? 1.0f : 0.0f, 0.5f, 0.25f});
    auto m = rect_mask(16, 16, 0, 0, 4, 16);
    auto block = pack_conditioning(make_request(img, m, 8, 8));
    CHECK(block.at(16, 0, 0) == 1.0f);
    CHECK(block.at(17, 1, 1) == 0.5f);
    CHECK(block.at(8, 0, 0) == 0.5f);  // half the pooled window is masked
    CHECK(block.at(24, 0, 1) == 0.5f);
    for (int ch : {11, 12, 13, 14, 15, 19, 20, 21, 22, 23}) CHECK(block.at(ch, 0, 0) == 0.0f);
  }
  SUBCASE("serialization round trip") {
    Image img(24, 16);
    Rng rng(1);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform());
    auto block = pack_conditioning(make_request(img, random_mask(24, 16, 0.5, rng), 12, 8));
    auto bytes = serialize_conditioning(block);
    CHECK(bytes.size() == 16 + 4 * block.data.size());
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "PBCB");
    auto back = parse_conditioning(bytes);
    CHECK(back.channels == 25);
    CHECK(back.height == 3);
    CHECK(back.width == 2);
    CHECK(back.data == block.data);
    bytes.pop_back();
    CHECK_THROWS_AS(parse_conditioning(bytes), Error);
  }
  SUBCASE("channel roles") {
    CHECK(conditioning_channel_role(0) == "noise");
    CHECK(conditioning_channel_role(8) == "masked.r");
    CHECK(conditioning_channel_role(12) == "masked.pad");
    CHECK(conditioning_channel_role(18) == "context.b");
    CHECK(conditioning_channel_role(24) == "mask");
  }
  SUBCASE("bad resolution") {
    Image img(12, 16);
    CHECK_THROWS_AS(pack_conditioning(make_request(img, Mask(12, 16), 6, 8)), Error);
  }
}

TEST_CASE("completer names") {
  CHECK(completer_from_string("symmetry") == CompleterKind::symmetry);
  CHECK_THROWS_AS(completer_from_string("diffusion"), Error);
}
