#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "handrv/trajdata.hpp"

namespace handrv {

/// Per-frame coordinate deltas of a tracked point: deltas[t] = track[t+1] - track[t].
struct RelativePath {
  std::vector<Point2> deltas;

  std::size_t size() const noexcept { return deltas.size(); }
  bool empty() const noexcept { return deltas.empty(); }
  const Point2& operator[](std::size_t i) const { return deltas[i]; }

  friend bool operator==(const RelativePath&, const RelativePath&) = default;
};

inline constexpr std::size_t kDefaultMinLen = 5;

/// Half-open frame range [start, end).
struct FrameRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start; }
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

/// A contiguous slice of one trajectory. `relpath` covers frames [start, end),
/// so it holds end - start - 1 deltas. `embeddings` points at the parent's
/// resolved table, or is null when the parent has none.
struct Segment {
  std::string traj_id;
  std::size_t start = 0;
  std::size_t end = 0;
  RelativePath relpath;
  std::shared_ptr<const EmbeddingTable> embeddings;

  std::size_t length() const noexcept { return end - start; }
};

/// Throws Error(degenerate_path) for fewer than two points.
RelativePath to_relative(std::span<const Point2> track);

/// Builds a segment over [range.start, range.end) of `traj`. The parent's
/// embeddings are attached only if they are already resolved.
Segment make_segment(const Trajectory& traj, FrameRange range);

/// Maximal runs of frames with kin >= epsilon, dropping runs shorter than min_len.
std::vector<FrameRange> kinematic_ranges(std::span<const double> kin, double epsilon, std::size_t min_len);

std::vector<Segment> segment_kinematic(const Trajectory& traj, double epsilon,
                                       std::size_t min_len = kDefaultMinLen);

/// n contiguous ranges covering [0, frames); the first frames % n ranges get
/// one extra frame.
std::vector<FrameRange> even_ranges(std::size_t frames, std::size_t n, std::size_t min_len);

std::vector<Segment> split_even(const Trajectory& traj, std::size_t n, std::size_t min_len = kDefaultMinLen);

/// 10th percentile (linear interpolation) of all kin values in the dataset.
/// When that is not positive, the smallest positive kin value is used so
/// that exactly-stationary frames become cuts.
double default_epsilon(std::span<const Trajectory> dataset);

}  // namespace handrv
