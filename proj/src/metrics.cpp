#include "partbench/metrics.hpp"

#include <numeric>

#include "partbench/error.hpp"

namespace partbench {

double iou(const Mask& a, const Mask& b, double eps) {
  if (a.height() != b.height() || a.width() != b.width()) throw Error("size-mismatch", "IoU of masks of different size");
  auto inter = static_cast<double>(intersection_count(a, b));
  auto uni = static_cast<double>(union_count(a, b));
  return (inter + eps) / (uni + eps);
}

MatchResult greedy_match(const std::vector<Mask>& ranked, const std::vector<Mask>& gt, double tau) {
  if (!(tau > 0 && tau <= 1)) throw Error("invalid-argument", "tau must lie in (0, 1]");
  MatchResult result{std::vector<int>(ranked.size(), 0), std::vector<int>(ranked.size(), -1), tau};
  std::vector<bool> remaining(gt.size(), true);
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    int best = -1;
    double best_iou = -1;
    for (std::size_t s = 0; s < gt.size(); ++s) {
      if (!remaining[s]) continue;
      auto m = iou(ranked[k], gt[s]);
      if (m > best_iou) {
        best_iou = m;
        best = static_cast<int>(s);
      }
    }
    if (best >= 0 && best_iou >= tau) {
      result.labels[k] = 1;
      result.matched_gt[k] = best;
      remaining[best] = false;
    }
  }
  return result;
}

double average_precision(const MatchResult& match, int gt_count) {
  if (gt_count <= 0) throw Error("no-ground-truth");
  double sum = 0;
  int hits = 0;
  for (std::size_t k = 0; k < match.labels.size(); ++k) {
    hits += match.labels[k];
    if (match.labels[k]) sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return sum / gt_count;
}

double mean_ap(const std::vector<double>& per_sample_ap) {
  if (per_sample_ap.empty()) throw Error("empty-dataset");
  return std::accumulate(per_sample_ap.begin(), per_sample_ap.end(), 0.0) / static_cast<double>(per_sample_ap.size());
}

double recall_at_k(const std::vector<Mask>& ranked, const std::vector<Mask>& gt, double tau, int k) {
  if (gt.empty()) return 1.0;
  auto limit = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), ranked.size());
  int recovered = 0;
  for (const auto& g : gt) {
    double best = 0;
    for (std::size_t i = 0; i < limit; ++i) best = std::max(best, iou(ranked[i], g));
    if (limit > 0 && best > tau) ++recovered;
  }
  return static_cast<double>(recovered) / static_cast<double>(gt.size());
}

}  // namespace partbench
