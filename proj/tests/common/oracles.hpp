#pragma once

// Independent reference implementations used to cross-check the library. They work on plain
// pixel loops and explicit sums and share no code with the code under test.

#include <cmath>
#include <vector>

#include "partbench/image.hpp"

namespace oracle {

inline double iou(const partbench::Mask& a, const partbench::Mask& b, double eps = 1e-4) {
  long inter = 0, uni = 0;
  for (int r = 0; r < a.height(); ++r)
    for (int c = 0; c < a.width(); ++c) {
      bool x = a.get(r, c), y = b.get(r, c);
      inter += x && y;
      uni += x || y;
    }
  return (inter + eps) / (uni + eps);
}

// Labels y_k from scanning proposals in rank order: best remaining gt by IoU, then threshold.
inline std::vector<int> match_labels(const std::vector<partbench::Mask>& ranked, const std::vector<partbench::Mask>& gt,
                                     double tau) {
  std::vector<int> y;
  std::vector<bool> used(gt.size(), false);
  for (const auto& p : ranked) {
    // All IoUs against gt first, then the first maximum among unused ones.
    std::vector<double> m(gt.size());
    for (std::size_t s = 0; s < gt.size(); ++s) m[s] = iou(p, gt[s]);
    int arg = -1;
    for (std::size_t s = 0; s < gt.size(); ++s)
      if (!used[s] && (arg < 0 || m[s] > m[arg])) arg = static_cast<int>(s);
    if (arg >= 0 && m[arg] >= tau) {
      used[arg] = true;
      y.push_back(1);
    } else {
      y.push_back(0);
    }
  }
  return y;
}

// (1/S) sum_k sum_{i<=k} y_i y_k / k, evaluated literally as a double sum.
inline double average_precision(const std::vector<int>& y, int S) {
  double total = 0;
  for (std::size_t k = 1; k <= y.size(); ++k) {
    int inner = 0;
    for (std::size_t i = 1; i <= k; ++i) inner += y[i - 1] * y[k - 1];
    total += static_cast<double>(inner) / static_cast<double>(k);
  }
  return total / S;
}

inline double recall_at_k(const std::vector<partbench::Mask>& ranked, const std::vector<partbench::Mask>& gt, double tau,
                          int K) {
  int hit = 0;
  for (const auto& g : gt) {
    bool found = false;
    for (int k = 0; k < K && k < static_cast<int>(ranked.size()); ++k) found = found || iou(ranked[k], g) > tau;
    hit += found;
  }
  return static_cast<double>(hit) / gt.size();
}

// Emission-absorption quadrature over explicit per-sample densities and colours.
struct EaResult {
  double color[3] = {0, 0, 0};
  double transmittance = 1;
};

inline EaResult ea(const std::vector<double>& sigma, const std::vector<std::array<double, 3>>& color, double step) {
  EaResult out;
  double accumulated = 0;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    double before = std::exp(-accumulated);
    accumulated += step * sigma[j];
    double after = std::exp(-accumulated);
    for (int ch = 0; ch < 3; ++ch) out.color[ch] += (before - after) * color[j][ch];
  }
  out.transmittance = std::exp(-accumulated);
  return out;
}

}  // namespace oracle
