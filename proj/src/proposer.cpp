#include "partbench/proposer.hpp"

#include <algorithm>
#include <numeric>

#include "partbench/error.hpp"
#include "partbench/metrics.hpp"
#include "partbench/rng.hpp"

namespace partbench {

namespace {

// Morphology restricted to each tile so segments never leak into a neighbouring view.
Mask morph_per_tile(const Mask& m, int radius, int tile_h, int tile_w) {
  if (radius == 0) return m;
  Mask out(m.height(), m.width());
  for (int tile = 0; tile < 4; ++tile) {
    auto o = tile_origin(tile, tile_h, tile_w);
    Mask t(tile_h, tile_w);
    for (int r = 0; r < tile_h; ++r)
      for (int c = 0; c < tile_w; ++c)
        if (m.get(o.row + r, o.col + c)) t.set(r, c);
    t = radius > 0 ? dilate(t, radius) : erode(t, -radius);
    for (int r = 0; r < tile_h; ++r)
      for (int c = 0; c < tile_w; ++c)
        if (t.get(r, c)) out.set(o.row + r, o.col + c);
  }
  return out;
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

RankedProposals suppress(const std::vector<const Mask*>& masks, const std::vector<double>& scores) {
  std::vector<int> order(masks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  RankedProposals out;
  for (int i : order) {
    bool keep = std::all_of(out.masks.begin(), out.masks.end(),
                            [&](const Mask& kept) { return iou(kept, *masks[i]) < kDuplicateIou; });
    if (!keep) continue;
    out.masks.push_back(*masks[i]);
    out.scores.push_back(scores[i]);
    out.source.push_back(i);
  }
  return out;
}

}  // namespace

ProposalSet sample_noisy_oracle(const std::vector<Mask>& gt_masks, const NoiseSpec& noise, std::uint64_t seed,
                                int tile_height, int tile_width) {
  if (noise.merge_probability < 0 || noise.merge_probability > 1 || noise.drop_probability < 0 ||
      noise.drop_probability > 1 || noise.morph_radius < 0 || noise.runs < 0)
    throw Error("invalid-noise-spec");
  std::vector<int> present;
  for (int k = 0; k < static_cast<int>(gt_masks.size()); ++k)
    if (!gt_masks[k].empty()) present.push_back(k);
  std::vector<std::pair<int, int>> touching;
  for (std::size_t i = 0; i < present.size(); ++i)
    for (std::size_t j = i + 1; j < present.size(); ++j)
      if (adjacent(gt_masks[present[i]], gt_masks[present[j]])) touching.emplace_back(present[i], present[j]);

  Rng rng(mix_seed(seed, 0x70726f70));
  ProposalSet set;
  const int n = static_cast<int>(gt_masks.size());
  for (int run = 0; run < noise.runs; ++run) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (auto [a, b] : touching)
      if (rng.bernoulli(noise.merge_probability)) {
        auto ra = find_root(parent, a), rb = find_root(parent, b);
        parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    int index = 0;
    for (int root : present) {
      if (find_root(parent, root) != root) continue;
      Mask segment = gt_masks[root];
      for (int k : present)
        if (k != root && find_root(parent, k) == root) segment |= gt_masks[k];
      if (rng.bernoulli(noise.drop_probability)) continue;
      int radius = noise.morph_radius > 0 ? rng.integer(-noise.morph_radius, noise.morph_radius) : 0;
      auto mask = morph_per_tile(segment, radius, tile_height, tile_width);
      if (mask.empty()) continue;
      set.proposals.push_back({std::move(mask), run, index++});
    }
  }
  return set;
}

int reliability_score(const Mask& m, const ProposalSet& set) {
  int s = 0;
  for (const auto& p : set.proposals)
    if (iou(p.mask, m) > kDuplicateIou) ++s;
  return s;
}

std::vector<int> reliability_scores(const ProposalSet& set) {
  const auto n = set.proposals.size();
  std::vector<int> scores(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (iou(set.proposals[i].mask, set.proposals[j].mask) > kDuplicateIou) {
        ++scores[i];
        if (j != i) ++scores[j];
      }
  return scores;
}

RankedProposals rank_and_dedup(const ProposalSet& set) {
  auto s = reliability_scores(set);
  std::vector<const Mask*> masks;
  for (const auto& p : set.proposals) masks.push_back(&p.mask);
  return suppress(masks, {s.begin(), s.end()});
}

RankedProposals rank_and_dedup(const std::vector<Mask>& masks, const std::vector<double>& scores) {
  if (masks.size() != scores.size()) throw Error("invalid-argument", "one score per proposal expected");
  std::vector<const Mask*> ptrs;
  for (const auto& m : masks) ptrs.push_back(&m);
  return suppress(ptrs, scores);
}

RankedProposals seeded_query(const RankedProposals& ranked, int row, int col) {
  RankedProposals out;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& m = ranked.masks[i];
    if (row < 0 || col < 0 || row >= m.height() || col >= m.width())
      throw Error("seed-out-of-bounds", "seed point outside the grid");
    if (!m.get(row, col)) continue;
    out.masks.push_back(m);
    out.scores.push_back(ranked.scores[i]);
    out.source.push_back(ranked.source[i]);
  }
  return out;
}

}  // namespace partbench
