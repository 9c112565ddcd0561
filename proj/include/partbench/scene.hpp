#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partbench/math.hpp"

namespace partbench {

enum class PrimitiveKind { sphere, box, capsule, torus, rounded_cone };

std::string_view to_string(PrimitiveKind k);
PrimitiveKind primitive_kind_from_string(std::string_view s);

// Rigid transform. The stored quaternion is the source of truth; the matrix is derived from it.
class Pose {
 public:
  Pose() = default;
  Pose(Quat rotation, Vec3 translation) : rotation_(rotation), translation_(translation), matrix_(rotation.matrix()) {}

  const Quat& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  const Mat3& matrix() const { return matrix_; }

  Vec3 to_local(Vec3 p) const { return matrix_.transpose_mul(p - translation_); }
  Vec3 to_world(Vec3 p) const { return matrix_ * p + translation_; }

 private:
  Quat rotation_{};
  Vec3 translation_{};
  Mat3 matrix_{};
};

// Shape parameters by kind, all in the primitive's local frame:
//   sphere        radius = scale.x
//   box           half extents = scale
//   capsule       radius = scale.x, half segment length = scale.y (segment along local y)
//   torus         major radius = scale.x, tube radius = scale.y (ring in local xz plane)
//   rounded_cone  bottom radius = scale.x, top radius = scale.y, centre distance = scale.z
//                 (axis along local y, centred at the origin; requires |x - y| < z)
struct PartPrimitive {
  PrimitiveKind kind = PrimitiveKind::sphere;
  Pose pose;
  Vec3 scale{1, 1, 1};
  Vec3 albedo{0.8, 0.8, 0.8};

  double sdf(Vec3 world) const;
  Aabb bounds() const;
  // Centre and radius of a sphere enclosing the primitive.
  Vec3 bound_center() const { return pose.translation(); }
  double bound_radius() const;
};

// Throws Error("invalid-primitive") on non-positive scale, albedo outside [0,1] or bad cone radii.
void validate(const PartPrimitive& p);

struct Part {
  std::vector<PartPrimitive> primitives;  // 1..4

  struct Sample {
    double distance;
    Vec3 albedo;
  };
  Sample eval(Vec3 p) const;
  double sdf(Vec3 p) const { return eval(p).distance; }
  Aabb bounds() const;
};

struct Asset {
  std::string id;
  std::vector<Part> parts;
  Aabb bounds;

  // Radius of a sphere about the origin enclosing every primitive.
  double radius() const;
};

// Throws Error("invalid-asset") if the asset breaks its invariants.
void validate(const Asset& a);
// Recomputes bounds from the parts.
Aabb compute_bounds(const std::vector<Part>& parts);

struct SdfSample {
  double distance;
  int part_index;
  Vec3 albedo;
};

// Union SDF: minimum over parts, lowest index wins ties.
SdfSample sdf_eval(const Asset& asset, Vec3 p);

// Monte-Carlo estimate of each part's share of the union volume. Interior overlap goes to the
// part with the smallest signed distance. Throws Error("empty-asset") when no sample lands inside.
std::vector<double> part_volume_fractions(const Asset& asset, std::size_t samples = 100000, std::uint64_t seed = 0);

inline constexpr double kMinPartFraction = 0.05;
inline constexpr int kMaxParts = 10;

struct FilterResult {
  bool accepted = false;
  std::string reason;            // "too-many-parts" | "monolithic" | "" when accepted
  std::vector<int> culled;       // indices into the input asset
  std::optional<Asset> filtered; // input with culled parts removed (always set)
};

FilterResult filter_asset(const Asset& asset, const std::vector<double>& fractions);

enum class Template { stack, body_limbs, vehicle, table };
std::string_view to_string(Template t);
Template template_from_string(std::string_view s);

struct GeneratorSpec {
  std::optional<Template> shape;  // unset: drawn from the seed
  int part_count = 0;             // 0: uniform in [min_parts, max_parts]
  int min_parts = 2;
  int max_parts = 8;
  std::size_t volume_samples = 100000;
  int max_attempts = 32;
};

inline constexpr int kGeneratorVersion = 1;

// Single template draw, no filtering. Deterministic in (seed, spec, attempt).
Asset generate_candidate(std::uint64_t seed, const GeneratorSpec& spec, int attempt = 0);

// Deterministic in seed; retries candidate draws until one is accepted by filter_asset without
// culls. Throws Error("infeasible-spec") when the spec cannot be met.
Asset generate_asset(std::uint64_t seed, const GeneratorSpec& spec = {});

// Rotates the whole asset about the vertical (y) axis.
Asset rotate_about_vertical(const Asset& asset, double degrees);

// Rounds every stored scalar to 9 significant digits, the precision of the file form.
Asset canonicalize(const Asset& asset);
double round_sig9(double v);

// Versioned JSON document; floats written with 9 significant digits.
std::string asset_to_json(const Asset& asset);
Asset asset_from_json(std::string_view text);
void save_asset(const Asset& asset, const std::string& path);
Asset load_asset(const std::string& path);

struct ManifestEntry {
  std::string id;
  std::string path;  // relative to the manifest directory
  int part_count = 0;
  std::vector<double> volume_fractions;
};

struct DatasetManifest {
  std::uint64_t seed = 0;
  int generator_version = kGeneratorVersion;
  std::vector<ManifestEntry> assets;
};

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(std::string_view text);

}  // namespace partbench
