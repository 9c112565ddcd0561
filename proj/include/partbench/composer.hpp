#pragma once

#include <string>
#include <vector>

#include "partbench/field.hpp"

namespace partbench {

struct Assembly {
  std::vector<PartField> fields;
  std::vector<std::string> labels;
};

struct ComposeRender {
  Image rgb;
  std::vector<float> alpha;
  // Per part, per pixel: sum_j (T_{j-1} - T_j) w_j^h.
  std::vector<std::vector<float>> part_visibility;
};

// Multi-part emission-absorption on a shared ray lattice: densities add in the transmittance and
// each sample's colour is the density-weighted mix w^h = sigma^h / sum_l sigma^l (0 where the
// total is 0).
ComposeRender compose_render(const Assembly& assembly, const Camera& cam, double step);

struct MixedSample {
  double sigma = 0;              // sum over parts
  std::vector<double> weights;   // w^h, all zero where sigma == 0
  Vec3 color;                    // sum_h w^h c^h
};
MixedSample mix_at(const Assembly& assembly, Vec3 p);

// Composite transmittance after each lattice sample t_j = (j + 0.5) * step, t_j <= t_max.
std::vector<double> composite_transmittance(const Assembly& assembly, const Ray& ray, double step, double t_max);

// sigma = sum_h sigma^h and colour = sum_h w^h c^h per voxel. Fields on differing lattices are
// resampled onto the union bounds at the finest resolution first.
PartField merge_fields(const Assembly& assembly);

}  // namespace partbench
