#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "handrv/pathops.hpp"

namespace handrv {

/// Optimal subsequence alignment: `cost` is the cumulative local distance
/// along the alignment, [start, end) the matched span of the reference.
struct MatchResult {
  double cost = 0.0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

inline constexpr std::size_t kNoBand = std::numeric_limits<std::size_t>::max();

/// Subsequence DTW with Euclidean local distance between deltas.
///
/// D(0, j) = 0 (free start), D(i, 0) = inf, and
/// D(i, j) = d(i, j) + min(D(i-1, j-1), D(i-1, j), D(i, j-1)).
/// The reported end is the smallest j minimising D(|q|, j); among optimal
/// alignments ending there the one with the smallest start is reported
/// (remaining ties prefer diagonal, then vertical, then horizontal steps).
MatchResult sdtw_match(const RelativePath& q, const RelativePath& r);

/// Same DP with cells pruned when |i - (j - start)| > band for the start the
/// cell's alignment began at. Cost is never below sdtw_match; it may be
/// +inf when no alignment fits the band. band >= max(|q|, |r|) reproduces
/// sdtw_match exactly.
MatchResult sdtw_banded(const RelativePath& q, const RelativePath& r, std::size_t band);

/// Classic DTW with both endpoints pinned.
double dtw_full(const RelativePath& q, const RelativePath& r);

/// Brute force over every window r[s:e] with dtw_full; ties keep the
/// smallest e, then the smallest s. O(|r|^3 |q|), test use only.
MatchResult sdtw_oracle(const RelativePath& q, const RelativePath& r);

/// Per-frame embedding rows, used by the embedding-space distance mode.
using FeatureSequence = std::vector<std::span<const float>>;

/// Nearest stored embedding row for every frame of the segment.
FeatureSequence frame_features(const Segment& s);

/// Subsequence DTW over embedding vectors with Euclidean local distance;
/// identical recurrence and tie-breaks to the path version.
MatchResult sdtw_match(const FeatureSequence& q, const FeatureSequence& r);

}  // namespace handrv
