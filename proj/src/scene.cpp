#include "partbench/scene.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "json_util.hpp"
#include "partbench/error.hpp"
#include "partbench/rng.hpp"

namespace partbench {

using detail::json;

std::string_view to_string(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::sphere: return "sphere";
    case PrimitiveKind::box: return "box";
    case PrimitiveKind::capsule: return "capsule";
    case PrimitiveKind::torus: return "torus";
    case PrimitiveKind::rounded_cone: return "rounded-cone";
  }
  return "?";
}

PrimitiveKind primitive_kind_from_string(std::string_view s) {
  for (auto k : {PrimitiveKind::sphere, PrimitiveKind::box, PrimitiveKind::capsule, PrimitiveKind::torus,
                 PrimitiveKind::rounded_cone})
    if (to_string(k) == s) return k;
  throw Error("bad-format", "unknown primitive kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Primitive distance functions (exact Euclidean distances, so sphere tracing
// never overshoots).

namespace {

double sd_sphere(Vec3 p, double r) { return length(p) - r; }

double sd_box(Vec3 p, Vec3 b) {
  auto q = abs(p) - b;
  return length(max(q, Vec3{})) + std::min(max_component(q), 0.0);
}

double sd_capsule(Vec3 p, double r, double h) {
  p.y -= std::clamp(p.y, -h, h);
  return length(p) - r;
}

double sd_torus(Vec3 p, double major, double minor) {
  auto qx = std::hypot(p.x, p.z) - major;
  return std::hypot(qx, p.y) - minor;
}

double sd_rounded_cone(Vec3 p, double r1, double r2, double h) {
  p.y += h / 2;
  auto b = (r1 - r2) / h;
  auto a = std::sqrt(1 - b * b);
  auto qx = std::hypot(p.x, p.z), qy = p.y;
  auto k = -b * qx + a * qy;
  if (k < 0) return std::hypot(qx, qy) - r1;
  if (k > a * h) return std::hypot(qx, qy - h) - r2;
  return qx * a + qy * b - r1;
}

}  // namespace

double PartPrimitive::sdf(Vec3 world) const {
  auto p = pose.to_local(world);
  switch (kind) {
    case PrimitiveKind::sphere: return sd_sphere(p, scale.x);
    case PrimitiveKind::box: return sd_box(p, scale);
    case PrimitiveKind::capsule: return sd_capsule(p, scale.x, scale.y);
    case PrimitiveKind::torus: return sd_torus(p, scale.x, scale.y);
    case PrimitiveKind::rounded_cone: return sd_rounded_cone(p, scale.x, scale.y, scale.z);
  }
  return INFINITY;
}

double PartPrimitive::bound_radius() const {
  switch (kind) {
    case PrimitiveKind::sphere: return scale.x;
    case PrimitiveKind::box: return length(scale);
    case PrimitiveKind::capsule: return scale.x + scale.y;
    case PrimitiveKind::torus: return scale.x + scale.y;
    case PrimitiveKind::rounded_cone: return scale.z / 2 + std::max(scale.x, scale.y);
  }
  return 0;
}

Aabb PartPrimitive::bounds() const {
  Vec3 lo, hi;
  switch (kind) {
    case PrimitiveKind::sphere: hi = {scale.x, scale.x, scale.x}; break;
    case PrimitiveKind::box: hi = scale; break;
    case PrimitiveKind::capsule: hi = {scale.x, scale.x + scale.y, scale.x}; break;
    case PrimitiveKind::torus: hi = {scale.x + scale.y, scale.y, scale.x + scale.y}; break;
    case PrimitiveKind::rounded_cone: {
      auto r = std::max(scale.x, scale.y);
      lo = {-r, -scale.z / 2 - scale.x, -r};
      hi = {r, scale.z / 2 + scale.y, r};
      break;
    }
  }
  if (kind != PrimitiveKind::rounded_cone) lo = -hi;
  Aabb box{pose.to_world(lo), pose.to_world(lo)};
  for (int i = 0; i < 8; ++i)
    box.expand(pose.to_world({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z}));
  return box;
}

void validate(const PartPrimitive& p) {
  if (!(p.scale.x > 0 && p.scale.y > 0 && p.scale.z > 0)) throw Error("invalid-primitive", "scale must be positive");
  for (int i = 0; i < 3; ++i)
    if (!(p.albedo[i] >= 0 && p.albedo[i] <= 1)) throw Error("invalid-primitive", "albedo outside [0,1]");
  if (p.kind == PrimitiveKind::rounded_cone && !(std::abs(p.scale.x - p.scale.y) < p.scale.z))
    throw Error("invalid-primitive", "rounded cone needs |r1 - r2| < height");
  const auto& m = p.pose.matrix();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto d = dot(m.rows[i], m.rows[j]) - (i == j ? 1.0 : 0.0);
      if (std::abs(d) > 1e-6) throw Error("invalid-primitive", "rotation not orthonormal");
    }
}

Part::Sample Part::eval(Vec3 p) const {
  Sample best{INFINITY, {}};
  for (const auto& prim : primitives) {
    auto d = prim.sdf(p);
    if (d < best.distance) best = {d, prim.albedo};
  }
  return best;
}

Aabb Part::bounds() const {
  Aabb box = primitives.front().bounds();
  for (const auto& prim : primitives) box.expand(prim.bounds());
  return box;
}

Aabb compute_bounds(const std::vector<Part>& parts) {
  if (parts.empty()) return {};
  Aabb box = parts.front().bounds();
  for (const auto& part : parts) box.expand(part.bounds());
  return box;
}

double Asset::radius() const {
  double r = 0;
  for (const auto& part : parts)
    for (const auto& prim : part.primitives) r = std::max(r, length(prim.bound_center()) + prim.bound_radius());
  return r;
}

void validate(const Asset& a) {
  if (a.parts.empty()) throw Error("invalid-asset", "asset has no parts");
  for (const auto& part : a.parts) {
    if (part.primitives.empty() || part.primitives.size() > 4)
      throw Error("invalid-asset", "a part is a union of 1 to 4 primitives");
    for (const auto& prim : part.primitives) validate(prim);
    auto b = part.bounds();
    for (int i = 0; i < 3; ++i)
      if (b.hi[i] < a.bounds.lo[i] || b.lo[i] > a.bounds.hi[i]) throw Error("invalid-asset", "part outside bounds");
  }
}

SdfSample sdf_eval(const Asset& asset, Vec3 p) {
  SdfSample best{INFINITY, -1, {}};
  for (int k = 0; k < static_cast<int>(asset.parts.size()); ++k) {
    auto s = asset.parts[k].eval(p);
    if (s.distance < best.distance || best.part_index < 0) best = {s.distance, k, s.albedo};
  }
  return best;
}

std::vector<double> part_volume_fractions(const Asset& asset, std::size_t samples, std::uint64_t seed) {
  if (samples < 10000) throw Error("invalid-argument", "volume estimation needs at least 1e4 samples");
  Rng rng(mix_seed(seed, 0x766f6c));
  std::vector<std::size_t> counts(asset.parts.size(), 0);
  std::size_t inside = 0;
  const auto& b = asset.bounds;
  for (std::size_t i = 0; i < samples; ++i) {
    Vec3 p{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y), rng.uniform(b.lo.z, b.hi.z)};
    auto s = sdf_eval(asset, p);
    if (s.distance < 0) {
      ++counts[s.part_index];
      ++inside;
    }
  }
  if (inside == 0) throw Error("empty-asset", asset.id);
  std::vector<double> fractions(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) fractions[k] = static_cast<double>(counts[k]) / inside;
  return fractions;
}

FilterResult filter_asset(const Asset& asset, const std::vector<double>& fractions) {
  if (fractions.size() != asset.parts.size()) throw Error("invalid-argument", "one fraction per part expected");
  FilterResult result;
  Asset kept{asset.id, {}, {}};
  for (int k = 0; k < static_cast<int>(fractions.size()); ++k) {
    if (fractions[k] < kMinPartFraction)
      result.culled.push_back(k);
    else
      kept.parts.push_back(asset.parts[k]);
  }
  kept.bounds = kept.parts.empty() ? asset.bounds : compute_bounds(kept.parts);
  auto remaining = static_cast<int>(kept.parts.size());
  if (remaining > kMaxParts)
    result.reason = "too-many-parts";
  else if (remaining == 1)
    result.reason = "monolithic";
  else if (remaining == 0)
    result.reason = "empty";
  result.accepted = result.reason.empty();
  result.filtered = std::move(kept);
  return result;
}

// ---------------------------------------------------------------------------
// Templates

std::string_view to_string(Template t) {
  switch (t) {
    case Template::stack: return "stack";
    case Template::body_limbs: return "body+limbs";
    case Template::vehicle: return "vehicle";
    case Template::table: return "table";
  }
  return "?";
}

Template template_from_string(std::string_view s) {
  for (auto t : {Template::stack, Template::body_limbs, Template::vehicle, Template::table})
    if (to_string(t) == s) return t;
  throw Error("invalid-argument", "unknown template '" + std::string(s) + "'");
}

namespace {

constexpr Vec3 kUp{0, 1, 0};

PartPrimitive primitive(PrimitiveKind kind, Vec3 center, Quat rotation, Vec3 scale, Vec3 albedo) {
  return {kind, Pose(rotation, center), scale, albedo};
}

Vec3 random_albedo(Rng& rng) { return {rng.uniform(0.25, 0.95), rng.uniform(0.25, 0.95), rng.uniform(0.25, 0.95)}; }

std::vector<Part> make_stack(Rng& rng, int n) {
  std::vector<Part> parts;
  double y = 0;
  for (int i = 0; i < n; ++i) {
    auto s = rng.uniform(0.75, 1.0);
    auto albedo = random_albedo(rng);
    auto spin = Quat::axis_angle(kUp, rng.uniform(0, std::numbers::pi));
    Vec3 jitter{rng.uniform(-0.08, 0.08), 0, rng.uniform(-0.08, 0.08)};
    auto overlap = 0.06 * s;
    Part part;
    switch (rng.integer(0, 2)) {
      case 0: {
        part.primitives.push_back(primitive(PrimitiveKind::sphere, jitter + Vec3{0, y + s - overlap, 0}, {}, {s, s, s}, albedo));
        y += 2 * s - overlap;
        break;
      }
      case 1: {
        Vec3 half{s * rng.uniform(0.8, 1.0), s * rng.uniform(0.6, 0.85), s * rng.uniform(0.8, 1.0)};
        part.primitives.push_back(primitive(PrimitiveKind::box, jitter + Vec3{0, y + half.y - overlap, 0}, spin, half, albedo));
        y += 2 * half.y - overlap;
        break;
      }
      default: {
        auto r1 = s, r2 = s * rng.uniform(0.6, 0.85), h = s * rng.uniform(0.7, 1.0);
        part.primitives.push_back(
            primitive(PrimitiveKind::rounded_cone, jitter + Vec3{0, y + h / 2 + r1 - overlap, 0}, spin, {r1, r2, h}, albedo));
        y += h + r1 + r2 - overlap;
        break;
      }
    }
    // Occasional knob so some parts are multi-primitive unions.
    if (rng.bernoulli(0.3)) {
      auto c = part.primitives.front().pose.translation();
      auto a = rng.uniform(0, 2 * std::numbers::pi);
      auto r = 0.35 * s;
      part.primitives.push_back(
          primitive(PrimitiveKind::sphere, c + Vec3{std::cos(a) * 0.75 * s, 0, std::sin(a) * 0.75 * s}, {}, {r, r, r}, albedo));
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

std::vector<Part> make_body_limbs(Rng& rng, int n) {
  std::vector<Part> parts;
  auto body_albedo = random_albedo(rng);
  Part body;
  if (rng.bernoulli(0.5))
    body.primitives.push_back(primitive(PrimitiveKind::sphere, {}, {}, {1, 1, 1}, body_albedo));
  else
    body.primitives.push_back(primitive(PrimitiveKind::box, {}, Quat::axis_angle(kUp, rng.uniform(0, 1.5)),
                                        {0.85, 0.8, 0.85}, body_albedo));
  parts.push_back(std::move(body));
  const int limbs = n - 1;
  const double phase = rng.uniform(0, 2 * std::numbers::pi);
  for (int i = 0; i < limbs; ++i) {
    auto az = phase + 2 * std::numbers::pi * i / limbs + rng.uniform(-0.25, 0.25);
    auto el = radians(rng.uniform(-55, 35));
    Vec3 dir{std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az)};
    auto r = rng.uniform(0.38, 0.46), h = rng.uniform(0.45, 0.6);
    Part limb;
    limb.primitives.push_back(
        primitive(PrimitiveKind::capsule, dir * (1.0 + 0.85 * h), Quat::between(kUp, dir), {r, h, r}, random_albedo(rng)));
    parts.push_back(std::move(limb));
  }
  return parts;
}

std::vector<Part> make_vehicle(Rng& rng, int n) {
  std::vector<Part> parts;
  auto paint = random_albedo(rng);
  Vec3 half{rng.uniform(0.95, 1.1), 0.3, rng.uniform(0.45, 0.55)};
  Part body;
  body.primitives.push_back(primitive(PrimitiveKind::box, {}, {}, half, paint));
  parts.push_back(std::move(body));

  int wheels = (n - 1) % 2 == 0 ? n - 1 : n - 2;
  bool cabin = (n - 1) % 2 == 1;
  if (cabin) {
    Part c;
    Vec3 ch{half.x * rng.uniform(0.45, 0.6), 0.25, half.z * 0.8};
    c.primitives.push_back(primitive(PrimitiveKind::box, {rng.uniform(-0.2, 0.1), half.y + ch.y - 0.03, 0}, {}, ch, random_albedo(rng)));
    parts.push_back(std::move(c));
  }
  const int per_side = wheels / 2;
  const auto axle = Quat::between(kUp, {0, 0, 1});
  const double wr = rng.uniform(0.32, 0.36);
  for (int i = 0; i < per_side; ++i) {
    double x = per_side == 1 ? 0.0 : -0.75 * half.x + 1.5 * half.x * i / (per_side - 1);
    for (double side : {-1.0, 1.0}) {
      Vec3 c{x, -half.y, side * (half.z + 0.04)};
      auto tire = random_albedo(rng) * 0.5;
      Part w;
      w.primitives.push_back(primitive(PrimitiveKind::rounded_cone, c, axle, {wr, wr * 0.85, 0.12}, tire));
      w.primitives.push_back(primitive(PrimitiveKind::torus, c, axle, {wr * 0.8, 0.1, 0.1}, tire));
      parts.push_back(std::move(w));
    }
  }
  return parts;
}

std::vector<Part> make_table(Rng& rng, int n) {
  std::vector<Part> parts;
  Vec3 half{rng.uniform(0.9, 1.1), 0.08, rng.uniform(0.6, 0.75)};
  Part top;
  top.primitives.push_back(primitive(PrimitiveKind::box, {}, {}, half, random_albedo(rng)));
  parts.push_back(std::move(top));
  const int legs = n - 1;
  const auto leg_albedo = random_albedo(rng);
  const double h = rng.uniform(0.42, 0.5);
  const double r = legs == 1 ? 0.3 : 0.15;
  for (int i = 0; i < legs; ++i) {
    Vec3 c{0, -half.y - h + 0.02, 0};
    if (legs > 1) {
      auto a = std::numbers::pi / 4 + 2 * std::numbers::pi * i / legs;
      c.x = std::cos(a) * (half.x - r - 0.02) * 0.95;
      c.z = std::sin(a) * (half.z - r - 0.02) * 0.95;
    }
    Part leg;
    leg.primitives.push_back(primitive(PrimitiveKind::capsule, c, {}, {r, h, r}, leg_albedo));
    parts.push_back(std::move(leg));
  }
  return parts;
}

// Centre on the bounds and scale so every primitive fits inside the unit sphere.
std::vector<Part> normalize_parts(std::vector<Part> parts) {
  auto center = compute_bounds(parts).center();
  double radius = 0;
  for (const auto& part : parts)
    for (const auto& prim : part.primitives)
      radius = std::max(radius, length(prim.bound_center() - center) + prim.bound_radius());
  auto s = 1.0 / radius;
  for (auto& part : parts)
    for (auto& prim : part.primitives) {
      prim.pose = Pose(prim.pose.rotation(), (prim.pose.translation() - center) * s);
      prim.scale *= s;
    }
  return parts;
}

}  // namespace

Asset generate_candidate(std::uint64_t seed, const GeneratorSpec& spec, int attempt) {
  if (spec.min_parts < 2 || spec.max_parts > kMaxParts || spec.min_parts > spec.max_parts)
    throw Error("infeasible-spec", "part count bounds must lie in [2, 10]");
  if (spec.part_count != 0 && (spec.part_count < spec.min_parts || spec.part_count > spec.max_parts))
    throw Error("infeasible-spec", "part count outside the generator bounds");
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
  auto shape = spec.shape ? *spec.shape : static_cast<Template>(rng.integer(0, 3));
  int n = spec.part_count ? spec.part_count : rng.integer(spec.min_parts, spec.max_parts);
  std::vector<Part> parts;
  switch (shape) {
    case Template::stack: parts = make_stack(rng, n); break;
    case Template::body_limbs: parts = make_body_limbs(rng, n); break;
    case Template::vehicle: parts = make_vehicle(rng, n); break;
    case Template::table: parts = make_table(rng, n); break;
  }
  Asset asset{"seed-" + std::to_string(seed), normalize_parts(std::move(parts)), {}};
  asset.bounds = compute_bounds(asset.parts);
  return canonicalize(asset);
}

Asset generate_asset(std::uint64_t seed, const GeneratorSpec& spec) {
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    auto asset = generate_candidate(seed, spec, attempt);
    auto fractions = part_volume_fractions(asset, spec.volume_samples, mix_seed(seed, 1000 + attempt));
    auto verdict = filter_asset(asset, fractions);
    if (verdict.accepted && verdict.culled.empty()) return asset;
  }
  throw Error("infeasible-spec", "no accepted asset after " + std::to_string(spec.max_attempts) + " attempts");
}

Asset rotate_about_vertical(const Asset& asset, double degrees) {
  auto q = Quat::axis_angle(kUp, radians(degrees));
  auto m = q.matrix();
  Asset out = asset;
  for (auto& part : out.parts)
    for (auto& prim : part.primitives) prim.pose = Pose(q * prim.pose.rotation(), m * prim.pose.translation());
  out.bounds = compute_bounds(out.parts);
  return out;
}

double round_sig9(double v) {
  if (v == 0 || !std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

namespace {
Vec3 round3(Vec3 v) { return {round_sig9(v.x), round_sig9(v.y), round_sig9(v.z)}; }
}  // namespace

Asset canonicalize(const Asset& asset) {
  Asset out = asset;
  for (auto& part : out.parts)
    for (auto& prim : part.primitives) {
      auto q = prim.pose.rotation();
      prim.pose = Pose({round_sig9(q.w), round_sig9(q.x), round_sig9(q.y), round_sig9(q.z)},
                       round3(prim.pose.translation()));
      prim.scale = round3(prim.scale);
      prim.albedo = round3(prim.albedo);
    }
  out.bounds = {round3(out.bounds.lo), round3(out.bounds.hi)};
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string asset_to_json(const Asset& asset) {
  using detail::number;
  using detail::vec3;
  json parts = json::array();
  for (const auto& part : asset.parts) {
    json prims = json::array();
    for (const auto& p : part.primitives) {
      auto q = p.pose.rotation();
      prims.push_back({{"kind", to_string(p.kind)},
                       {"rotation", {number(q.w), number(q.x), number(q.y), number(q.z)}},
                       {"translation", vec3(p.pose.translation())},
                       {"scale", vec3(p.scale)},
                       {"albedo", vec3(p.albedo)}});
    }
    parts.push_back({{"primitives", prims}});
  }
  json j{{"format", "partbench.asset"},
         {"version", 1},
         {"id", asset.id},
         {"bounds", {{"min", vec3(asset.bounds.lo)}, {"max", vec3(asset.bounds.hi)}}},
         {"parts", parts}};
  return detail::dump(j, 1) + "\n";
}

Asset asset_from_json(std::string_view text) {
  auto j = detail::parse(std::string(text), "asset");
  try {
    if (j.at("format") != "partbench.asset" || j.at("version") != 1)
      throw Error("bad-format", "unsupported asset format or version");
    Asset a;
    a.id = j.at("id").get<std::string>();
    a.bounds = {detail::to_vec3(j.at("bounds").at("min")), detail::to_vec3(j.at("bounds").at("max"))};
    for (const auto& jp : j.at("parts")) {
      Part part;
      for (const auto& jq : jp.at("primitives")) {
        const auto& r = jq.at("rotation");
        PartPrimitive p;
        p.kind = primitive_kind_from_string(jq.at("kind").get<std::string>());
        p.pose = Pose({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(), r.at(3).get<double>()},
                      detail::to_vec3(jq.at("translation")));
        p.scale = detail::to_vec3(jq.at("scale"));
        p.albedo = detail::to_vec3(jq.at("albedo"));
        part.primitives.push_back(p);
      }
      a.parts.push_back(std::move(part));
    }
    validate(a);
    return a;
  } catch (const json::exception& e) {
    throw Error("bad-format", std::string("asset: ") + e.what());
  }
}

void save_asset(const Asset& asset, const std::string& path) { write_text(path, asset_to_json(asset)); }
Asset load_asset(const std::string& path) { return asset_from_json(read_text(path)); }

std::string manifest_to_json(const DatasetManifest& m) {
  json assets = json::array();
  for (const auto& e : m.assets) {
    json fr = json::array();
    for (auto f : e.volume_fractions) fr.push_back(detail::number(f));
    assets.push_back({{"id", e.id}, {"path", e.path}, {"part_count", e.part_count}, {"volume_fractions", fr}});
  }
  json j{{"format", "partbench.manifest"}, {"seed", m.seed}, {"generator_version", m.generator_version}, {"assets", assets}};
  return detail::dump(j, 1) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  auto j = detail::parse(std::string(text), "manifest");
  try {
    DatasetManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.generator_version = j.at("generator_version").get<int>();
    for (const auto& e : j.at("assets"))
      m.assets.push_back({e.at("id").get<std::string>(), e.at("path").get<std::string>(), e.at("part_count").get<int>(),
                          e.at("volume_fractions").get<std::vector<double>>()});
    return m;
  } catch (const json::exception& e) {
    throw Error("bad-format", std::string("manifest: ") + e.what());
  }
}

}  // namespace partbench
