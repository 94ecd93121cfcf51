#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "handrv/manifest.hpp"
#include "handrv/pathops.hpp"
#include "handrv/sdtw.hpp"
#include "handrv/visfilter.hpp"

namespace handrv {

struct ExecutionOptions {
  unsigned threads = 0;  // 0: machine parallelism
};

/// Maps non-negative costs to training weights in [0.01, 100]:
/// c_hat = c / sum(c), u = exp(-c_hat), then an affine min-max map of u onto
/// [0.01, 100]. All-equal costs (including a single cost) and a zero sum map
/// to 1.0. Lower cost never gets a lower weight.
std::vector<double> normalize_weights(std::span<const double> costs);

struct ScoredMatch {
  const Segment* segment = nullptr;
  MatchResult match;
  std::optional<VisualCost> visual;
};

/// Total order (cost, traj_id, start), first K kept.
std::vector<ScoredMatch> rank_matches(std::vector<ScoredMatch> matches, std::size_t K);

/// For every hand segment: optional top-M visual filter, one S-DTW match per
/// surviving play segment, top-K by path cost, weights over the retained
/// costs. Output is independent of the worker count.
RetrievalManifest retrieve(std::span<const Segment> hand_segments, std::span<const Segment> play_segments,
                           const RetrievalParams& params, const ExecutionOptions& exec = {});

/// Score-only ranking used by the visual-rank and text-score baselines: the
/// whole segment is the match and cost_path carries the score.
/// `scores[q][c]` is the score of play segment c for hand segment q.
RetrievalManifest rank_by_scores(std::span<const Segment> hand_segments, std::span<const Segment> play_segments,
                                 const std::vector<std::vector<double>>& scores, const RetrievalParams& params);

/// Visual-rank-only baseline: scores are visual costs.
RetrievalManifest retrieve_visual_only(std::span<const Segment> hand_segments,
                                       std::span<const Segment> play_segments, const RetrievalParams& params,
                                       const ExecutionOptions& exec = {});

}  // namespace handrv
