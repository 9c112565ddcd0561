#pragma once

#include <cstdint>
#include <vector>

#include "partbench/image.hpp"

namespace partbench {

// Stand-in for re-running a stochastic segmenter: each run perturbs the ground-truth masks.
struct NoiseSpec {
  double merge_probability = 0.0;
  double drop_probability = 0.0;
  int morph_radius = 0;
  int runs = 1;
};

struct Proposal {
  Mask mask;
  int run = 0;   // sampler run that produced it
  int part = 0;  // index within that run
};

struct ProposalSet {
  std::vector<Proposal> proposals;

  std::size_t size() const { return proposals.size(); }
};

// Per run: merge 4-adjacent part pairs with merge_probability, drop each resulting segment with
// drop_probability, then dilate (r > 0) or erode (r < 0) by r uniform in [-radius, radius], clipped
// to the segment's tile. Empty segments are not emitted. Zero noise returns the masks verbatim.
ProposalSet sample_noisy_oracle(const std::vector<Mask>& gt_masks, const NoiseSpec& noise, std::uint64_t seed,
                                int tile_height, int tile_width);

inline constexpr double kDuplicateIou = 0.5;

// |{M' in P : iou(M', M) > 1/2}|, self included.
int reliability_score(const Mask& m, const ProposalSet& set);
std::vector<int> reliability_scores(const ProposalSet& set);

struct RankedProposals {
  std::vector<Mask> masks;
  std::vector<double> scores;  // nonincreasing
  std::vector<int> source;     // index into the originating proposal list

  std::size_t size() const { return masks.size(); }
};

// Sort by descending score (stable over the input order), then greedily keep a mask only if its
// IoU with every kept mask is < 1/2.
RankedProposals rank_and_dedup(const ProposalSet& set);
// Same suppression for externally scored proposals.
RankedProposals rank_and_dedup(const std::vector<Mask>& masks, const std::vector<double>& scores);

// Ranked proposals containing pixel (row, col), order preserved. Throws Error("seed-out-of-bounds").
RankedProposals seeded_query(const RankedProposals& ranked, int row, int col);

}  // namespace partbench
