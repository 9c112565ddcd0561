#pragma once

#include <vector>

#include "partbench/image.hpp"

namespace partbench {

inline constexpr double kIouEpsilon = 1e-4;

// (|A n B| + eps) / (|A u B| + eps); two empty masks score exactly 1.
double iou(const Mask& a, const Mask& b, double eps = kIouEpsilon);

struct MatchResult {
  std::vector<int> labels;       // y_k
  std::vector<int> matched_gt;   // gt index for y_k = 1, else -1
  double tau = 0.5;
};

// Rank-order scan: each proposal takes the remaining gt with the highest IoU (lowest index on
// ties); it is a hit iff that IoU >= tau, in which case the gt is removed.
MatchResult greedy_match(const std::vector<Mask>& ranked, const std::vector<Mask>& gt, double tau);

// (1/S) sum_k sum_{i<=k} y_i y_k / k. Throws Error("no-ground-truth") for S = 0.
double average_precision(const MatchResult& match, int gt_count);

// Mean of per-sample APs. Throws Error("empty-dataset").
double mean_ap(const std::vector<double>& per_sample_ap);

// Fraction of gt masks whose best IoU among the first K proposals exceeds tau.
// With no ground truth the recall is vacuously 1.
double recall_at_k(const std::vector<Mask>& ranked, const std::vector<Mask>& gt, double tau, int k);

}  // namespace partbench
