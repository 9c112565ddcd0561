#pragma once

#include "partbench/math.hpp"

namespace partbench::detail {

// Indices j of the global lattice t_j = (j + 0.5) * step that fall inside the box along the ray
// (t >= 0). Returns false when there are none.
bool sample_span(const Ray& ray, const Aabb& box, double step, long& first, long& last);

}  // namespace partbench::detail
