#include "handrv/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "handrv/error.hpp"
#include "handrv/parallel.hpp"

namespace handrv {

namespace {

bool match_before(const ScoredMatch& a, const ScoredMatch& b) {
  return std::tie(a.match.cost, a.segment->traj_id, a.segment->start) <
         std::tie(b.match.cost, b.segment->traj_id, b.segment->start);
}

// Frame span of a match inside its segment. Path matches index deltas, so
// delta span [s, e) touches frames [s, e + 1).
ManifestMatch to_manifest_match(const Segment& query, const ScoredMatch& m, DistanceMode mode) {
  ManifestMatch out;
  out.query_start = query.start;
  out.query_end = query.end;
  out.traj_id = m.segment->traj_id;
  out.seg_start = m.segment->start;
  out.seg_end = m.segment->end;
  out.match_start = m.segment->start + m.match.start;
  out.match_end = m.segment->start + m.match.end + (mode == DistanceMode::path ? 1 : 0);
  out.cost_path = m.match.cost;
  if (m.visual) out.cost_visual = m.visual->value;
  return out;
}

void assign_weights(RetrievalManifest& manifest) {
  auto& matches = manifest.matches;
  if (manifest.params.weight_scope == WeightScope::union_all) {
    std::vector<double> costs;
    for (const auto& m : matches) costs.push_back(m.cost_path);
    if (costs.empty()) return;
    const auto w = normalize_weights(costs);
    for (std::size_t i = 0; i < matches.size(); ++i) matches[i].weight = w[i];
    return;
  }
  std::size_t begin = 0;
  while (begin < matches.size()) {
    std::size_t end = begin + 1;
    while (end < matches.size() && matches[end].query_start == matches[begin].query_start &&
           matches[end].query_end == matches[begin].query_end) {
      ++end;
    }
    std::vector<double> costs;
    for (std::size_t i = begin; i < end; ++i) costs.push_back(matches[i].cost_path);
    const auto w = normalize_weights(costs);
    for (std::size_t i = begin; i < end; ++i) matches[i].weight = w[i - begin];
    begin = end;
  }
}

RetrievalManifest empty_manifest(std::span<const Segment> hand, const RetrievalParams& params) {
  RetrievalManifest m;
  m.query_id = hand.empty() ? std::string{} : hand.front().traj_id;
  m.params = params;
  return m;
}

}  // namespace

std::vector<double> normalize_weights(std::span<const double> costs) {
  if (costs.empty()) throw Error(Errc::invalid_cost, "no costs to normalise");
  for (double c : costs) {
    if (!std::isfinite(c) || c < 0.0) throw Error(Errc::invalid_cost, "cost " + std::to_string(c) + " is not finite and >= 0");
  }
  std::vector<double> out(costs.size(), 1.0);
  const double sum = std::accumulate(costs.begin(), costs.end(), 0.0);
  const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
  if (sum == 0.0 || *lo == *hi) return out;

  std::vector<double> u(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) u[i] = std::exp(-costs[i] / sum);
  const double u_max = std::exp(-*lo / sum);
  const double u_min = std::exp(-*hi / sum);
  if (!(u_max > u_min)) return out;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const double w = kMinWeight + (kMaxWeight - kMinWeight) * (u[i] - u_min) / (u_max - u_min);
    out[i] = std::clamp(w, kMinWeight, kMaxWeight);
  }
  return out;
}

std::vector<ScoredMatch> rank_matches(std::vector<ScoredMatch> matches, std::size_t K) {
  const std::size_t keep = std::min(K, matches.size());
  std::partial_sort(matches.begin(), matches.begin() + static_cast<std::ptrdiff_t>(keep), matches.end(),
                    match_before);
  matches.resize(keep);
  return matches;
}

RetrievalManifest retrieve(std::span<const Segment> hand_segments, std::span<const Segment> play_segments,
                           const RetrievalParams& params, const ExecutionOptions& exec) {
  params.validate();
  if (hand_segments.empty()) throw Error(Errc::invalid_argument, "no hand segments to query with");
  RetrievalManifest manifest = empty_manifest(hand_segments, params);

  // Single-frame segments have no deltas and cannot be aligned.
  std::vector<Segment> play;
  play.reserve(play_segments.size());
  for (const auto& s : play_segments) {
    if (s.length() >= 2) play.push_back(s);
  }
  if (play.empty()) {
    manifest.warnings.emplace_back(kWarningEmptyPlaySet);
    return manifest;
  }

  const bool by_embedding = params.distance_mode == DistanceMode::embedding;
  std::vector<FeatureSequence> play_features;
  if (by_embedding) {
    play_features.reserve(play.size());
    for (const auto& s : play) play_features.push_back(frame_features(s));
  }

  for (const auto& query : hand_segments) {
    if (query.length() < 2) {
      throw Error(Errc::degenerate_path, "hand segment [" + std::to_string(query.start) + "," +
                                             std::to_string(query.end) + ") is too short to match");
    }

    std::vector<std::size_t> candidates;
    std::vector<std::optional<VisualCost>> visual(play.size());
    if (params.use_visual_filter) {
      for (const auto& c : rank_visual(query, play, params.M, exec.threads)) {
        candidates.push_back(c.index);
        visual[c.index] = c.cost;
      }
    } else {
      candidates.resize(play.size());
      std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    }

    const FeatureSequence query_features = by_embedding ? frame_features(query) : FeatureSequence{};
    std::vector<ScoredMatch> scored(candidates.size());
    parallel_for(candidates.size(), exec.threads, [&](std::size_t k) {
      const std::size_t idx = candidates[k];
      const MatchResult m = by_embedding ? sdtw_match(query_features, play_features[idx])
                                         : sdtw_match(query.relpath, play[idx].relpath);
      scored[k] = {&play[idx], m, visual[idx]};
    });

    for (const auto& m : rank_matches(std::move(scored), params.K)) {
      manifest.matches.push_back(to_manifest_match(query, m, params.distance_mode));
    }
  }
  assign_weights(manifest);
  return manifest;
}

RetrievalManifest rank_by_scores(std::span<const Segment> hand_segments, std::span<const Segment> play_segments,
                                 const std::vector<std::vector<double>>& scores, const RetrievalParams& params) {
  params.validate();
  if (scores.size() != hand_segments.size()) {
    throw Error(Errc::invalid_argument, "need one score row per hand segment");
  }
  RetrievalManifest manifest = empty_manifest(hand_segments, params);
  if (play_segments.empty()) {
    manifest.warnings.emplace_back(kWarningEmptyPlaySet);
    return manifest;
  }
  for (std::size_t q = 0; q < hand_segments.size(); ++q) {
    if (scores[q].size() != play_segments.size()) {
      throw Error(Errc::invalid_argument, "need one score per play segment");
    }
    std::vector<ScoredMatch> scored;
    scored.reserve(play_segments.size());
    for (std::size_t c = 0; c < play_segments.size(); ++c) {
      const auto& seg = play_segments[c];
      scored.push_back({&seg, {scores[q][c], 0, seg.length()}, VisualCost{scores[q][c]}});
    }
    for (const auto& m : rank_matches(std::move(scored), params.K)) {
      // Frame span equals the segment, so map as an embedding-mode match.
      manifest.matches.push_back(to_manifest_match(hand_segments[q], m, DistanceMode::embedding));
    }
  }
  assign_weights(manifest);
  return manifest;
}

RetrievalManifest retrieve_visual_only(std::span<const Segment> hand_segments,
                                       std::span<const Segment> play_segments, const RetrievalParams& params,
                                       const ExecutionOptions& exec) {
  std::vector<std::vector<double>> scores(hand_segments.size(), std::vector<double>(play_segments.size()));
  for (std::size_t q = 0; q < hand_segments.size(); ++q) {
    parallel_for(play_segments.size(), exec.threads, [&](std::size_t c) {
      scores[q][c] = visual_cost(hand_segments[q], play_segments[c]).value;
    });
  }
  return rank_by_scores(hand_segments, play_segments, scores, params);
}

}  // namespace handrv
