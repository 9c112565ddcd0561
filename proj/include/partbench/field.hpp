#pragma once

#include <cstdint>
#include <vector>

#include "partbench/image.hpp"
#include "partbench/math.hpp"
#include "partbench/render.hpp"

namespace partbench {

// Density + colour on a cubic lattice of res^3 voxels spanning `bounds`. Voxel (x, y, z) has
// centre lo + (i + 0.5) * voxel_size and flat index (z * res + y) * res + x.
struct PartField {
  int resolution = 0;
  Aabb bounds;
  double kappa = 0;
  std::vector<float> sigma;
  std::vector<float> rgb;  // 3 per voxel, interleaved

  PartField() = default;
  PartField(int res, Aabb box, double kappa);

  std::size_t voxel_count() const { return static_cast<std::size_t>(resolution) * resolution * resolution; }
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * resolution + y) * resolution + x;
  }
  Vec3 voxel_size() const { return bounds.size() / resolution; }
  Vec3 voxel_center(int x, int y, int z) const;

  struct Sample {
    double sigma;
    Vec3 premultiplied;  // sigma * colour
  };
  // Trilinear over voxel centres, zero outside the lattice. Colour is interpolated premultiplied
  // by density so it never bleeds towards black near the boundary.
  Sample sample(Vec3 p) const;

  double total_sigma() const;
  // Bounding box of voxels with sigma > 0, grown by one voxel (the interpolation support).
  // Returns false when the field is empty.
  bool support(Aabb& out) const;
};

enum class CarveRule { all_views, visible_views };

struct CarveConfig {
  int resolution = 96;
  double kappa = 50.0;
  CarveRule rule = CarveRule::all_views;
};

struct CarveResult {
  PartField field;
  bool empty = false;  // no silhouette pixels; field is all zero
};

// Shape-from-silhouette: a voxel is occupied iff its centre projects inside the mask in every
// view (all_views) or every view where it lands in frame (visible_views). Occupied voxels get
// sigma = kappa and the mean colour of the views in which they are the nearest occupied voxel.
// Throws Error("invalid-carve-config") for resolution outside [32, 256] or kappa <= 0.
CarveResult carve(const Image& part_views, const Mask& part_masks, const Rig& rig, int tile_height, int tile_width,
                  const Aabb& bounds, const CarveConfig& cfg = {});

struct FieldRender {
  Image rgb;
  std::vector<float> alpha;
};

// Emission-absorption quadrature on the global lattice t_j = (j + 0.5) * step along each ray:
// T_j = exp(-sum_{k<=j} step * sigma_k), v = sum_j (T_{j-1} - T_j) c_j with T_{-1} = 1,
// alpha = 1 - T_last. Throws Error("invalid-step") for step <= 0.
FieldRender render_field(const PartField& field, const Camera& cam, double step);

// Transmittance after each sample for one ray (diagnostics and tests).
std::vector<double> ray_transmittance(const PartField& field, const Ray& ray, double step, double t_max);

// Little-endian: "PBPF", u32 version, u32 resolution, f32 kappa, f32 lo[3], f32 hi[3] (40 bytes),
// then f32 sigma[res^3], then f32 red[res^3], green[res^3], blue[res^3].
std::vector<std::uint8_t> serialize_field(const PartField& f);
PartField parse_field(const std::vector<std::uint8_t>& bytes);

}  // namespace partbench
