#pragma once

#include <filesystem>
#include <string>

#include "partbench/image.hpp"
#include "partbench/rng.hpp"
#include "partbench/scene.hpp"

namespace testing {

using namespace partbench;

inline PartPrimitive primitive(PrimitiveKind kind, Vec3 at, Vec3 scale, Vec3 albedo = {0.8, 0.5, 0.3}) {
  PartPrimitive p;
  p.kind = kind;
  p.pose = Pose({}, at);
  p.scale = scale;
  p.albedo = albedo;
  return p;
}

inline Part sphere_part(Vec3 at, double r, Vec3 albedo = {0.8, 0.5, 0.3}) {
  return Part{{primitive(PrimitiveKind::sphere, at, {r, r, r}, albedo)}};
}

inline Part box_part(Vec3 at, Vec3 half, Vec3 albedo = {0.3, 0.6, 0.9}) {
  return Part{{primitive(PrimitiveKind::box, at, half, albedo)}};
}

inline Asset make_asset(std::vector<Part> parts, std::string id = "test") {
  Asset a;
  a.id = std::move(id);
  a.parts = std::move(parts);
  a.bounds = compute_bounds(a.parts);
  return a;
}

inline Mask random_mask(int h, int w, double p, Rng& rng) {
  Mask m(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (rng.bernoulli(p)) m.set(r, c);
  return m;
}

inline Mask rect_mask(int h, int w, int r0, int c0, int r1, int c1) {
  Mask m(h, w);
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c) m.set(r, c);
  return m;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("partbench-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
