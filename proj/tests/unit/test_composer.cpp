#include <doctest.h>

#include <cmath>

#include "../common/oracles.hpp"
#include "helpers.hpp"
#include "partbench/composer.hpp"
#include "partbench/error.hpp"
#include "partbench/render.hpp"

using namespace partbench;
using namespace testing;

namespace {

PartField blob(Vec3 centre, double radius, Rgb colour, double sigma, std::uint64_t seed, int res = 20) {
  PartField f(res, {{-1, -1, -1}, {1, 1, 1}}, sigma);
  Rng rng(seed);
  for (int z = 0; z < res; ++z)
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x) {
        auto p = f.voxel_center(x, y, z);
        if (length(p - centre) > radius) continue;
        auto i = f.index(x, y, z);
        f.sigma[i] = static_cast<float>(sigma * rng.uniform(0.5, 1.0));
        for (int ch = 0; ch < 3; ++ch) f.rgb[3 * i + ch] = static_cast<float>(std::clamp(colour[ch] + rng.uniform(-0.1, 0.1), 0.0, 1.0));
      }
  return f;
}

Assembly three_parts() {
  return {{blob({-0.3, 0, 0}, 0.45, {0.9f, 0.2f, 0.2f}, 6, 1), blob({0.3, 0.1, 0}, 0.4, {0.2f, 0.8f, 0.3f}, 4, 2),
           blob({0, -0.3, 0.2}, 0.35, {0.2f, 0.3f, 0.9f}, 9, 3)},
          {"a", "b", "c"}};
}

double max_diff(const Image& a, const Image& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, static_cast<double>(std::abs(a.data[i] - b.data[i])));
  return m;
}

}  // namespace

TEST_CASE("single field reduces to render_field") {
  auto f = blob({0.1, 0, -0.1}, 0.5, {0.7f, 0.5f, 0.2f}, 5, 4);
  Camera cam(60, 25, 3.0, 40, 24, 24);
  auto a = compose_render({{f}, {"only"}}, cam, 0.02);
  auto b = render_field(f, cam, 0.02);
  CHECK(max_diff(a.rgb, b.rgb) <= 1e-6);
  CHECK(a.rgb == b.rgb);
  CHECK(a.alpha == b.alpha);
}

TEST_CASE("two identical fields average colour and double the density") {
  PartField f(8, {{-1, -1, -1}, {1, 1, 1}}, 2.0), g = f;
  for (std::size_t i = 0; i < f.voxel_count(); ++i) {
    f.sigma[i] = g.sigma[i] = 2.0f;
    f.rgb[3 * i] = 1.0f;
    g.rgb[3 * i + 2] = 1.0f;
  }
  Assembly asmb{{f, g}, {"f", "g"}};
  auto m = mix_at(asmb, {0.1, 0.2, 0.3});
  CHECK(m.sigma == doctest::Approx(4.0));
  CHECK(m.color.x == doctest::Approx(0.5));
  CHECK(m.color.z == doctest::Approx(0.5));
  Ray ray{{-0.5, 0.05, 0.05}, {1, 0, 0}};
  auto t = composite_transmittance(asmb, ray, 0.05, 0.5);
  CHECK(t.back() == doctest::Approx(std::exp(-0.05 * 4.0 * t.size())).epsilon(1e-9));
  // Single-ray brute force: a field of density 2 sigma and the averaged colour.
  Camera cam(0, 0, 3.0, 40, 9, 9);
  auto img = compose_render(asmb, cam, 0.05);
  auto ray_c = cam.ray(4, 4);
  std::vector<double> sig;
  std::vector<std::array<double, 3>> col;
  for (long j = 0; (j + 0.5) * 0.05 < 6.0; ++j) {
    auto s = mix_at(asmb, ray_c.at((j + 0.5) * 0.05));
    sig.push_back(s.sigma);
    col.push_back({s.color.x, s.color.y, s.color.z});
  }
  auto ref = oracle::ea(sig, col, 0.05);
  for (int ch = 0; ch < 3; ++ch) CHECK(img.rgb.get(4, 4)[ch] == doctest::Approx(ref.color[ch]).epsilon(1e-6));
}

TEST_CASE("empty assembly fields render black") {
  Assembly asmb{{PartField(8, {{-1, -1, -1}, {1, 1, 1}}, 1), PartField(8, {{-1, -1, -1}, {1, 1, 1}}, 1)}, {"a", "b"}};
  auto img = compose_render(asmb, Camera(0, 20, 3, 40, 8, 8), 0.05);
  for (auto v : img.rgb.data) CHECK(v == 0.0f);
  for (auto a : img.alpha) CHECK(a == 0.0f);
}

TEST_CASE("permutation invariance") {
  auto asmb = three_parts();
  Assembly rev{{asmb.fields[2], asmb.fields[0], asmb.fields[1]}, {"c", "a", "b"}};
  Camera cam(120, 30, 3.0, 40, 20, 20);
  CHECK(max_diff(compose_render(asmb, cam, 0.02).rgb, compose_render(rev, cam, 0.02).rgb) <= 1e-6);
}

TEST_CASE("merge equivalence") {
  auto asmb = three_parts();
  auto merged = merge_fields(asmb);
  for (double az : {0.0, 75.0, 200.0}) {
    Camera cam(az, 20, 3.0, 40, 20, 20);
    auto a = compose_render(asmb, cam, 0.02);
    auto b = render_field(merged, cam, 0.02);
    CHECK(max_diff(a.rgb, b.rgb) <= 1e-5);
  }
  // Merge of one field is the field.
  auto one = merge_fields({{asmb.fields[0]}, {"a"}});
  CHECK(one.sigma == asmb.fields[0].sigma);
}

TEST_CASE("weights sum to one wherever density is present") {
  auto asmb = three_parts();
  Rng rng(6);
  for (int i = 0; i < 5000; ++i) {
    Vec3 p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto m = mix_at(asmb, p);
    double s = 0;
    for (auto w : m.weights) s += w;
    if (m.sigma > 0)
      CHECK(std::abs(s - 1.0) <= 1e-6);
    else
      CHECK(s == 0.0);
  }
}

TEST_CASE("composite transmittance is below each single-part transmittance") {
  auto asmb = three_parts();
  Ray ray{{-2, 0.05, 0.02}, normalize(Vec3{1, 0.05, 0.1})};
  auto tc = composite_transmittance(asmb, ray, 0.02, 4.0);
  for (const auto& f : asmb.fields) {
    auto t = ray_transmittance(f, ray, 0.02, 4.0);
    REQUIRE(t.size() == tc.size());
    for (std::size_t j = 0; j < t.size(); ++j) CHECK(tc[j] <= t[j] + 1e-15);
  }
}

TEST_CASE("visibility diagnostics partition the alpha") {
  auto asmb = three_parts();
  auto img = compose_render(asmb, Camera(40, 20, 3, 40, 16, 16), 0.02);
  for (std::size_t i = 0; i < img.alpha.size(); ++i) {
    double s = 0;
    for (const auto& v : img.part_visibility) s += v[i];
    CHECK(s == doctest::Approx(img.alpha[i]).epsilon(1e-5));
  }
}
