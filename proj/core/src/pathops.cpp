#include "handrv/pathops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "handrv/error.hpp"

namespace handrv {

RelativePath to_relative(std::span<const Point2> track) {
  if (track.size() < 2) {
    throw Error(Errc::degenerate_path, "a path needs at least 2 points, got " + std::to_string(track.size()));
  }
  RelativePath out;
  out.deltas.reserve(track.size() - 1);
  for (std::size_t t = 0; t + 1 < track.size(); ++t) out.deltas.push_back(track[t + 1] - track[t]);
  return out;
}

Segment make_segment(const Trajectory& traj, FrameRange range) {
  if (range.start >= range.end || range.end > traj.frames()) {
    throw Error(Errc::invalid_argument, "segment [" + std::to_string(range.start) + "," +
                                            std::to_string(range.end) + ") out of bounds for '" + traj.id + "'");
  }
  Segment s;
  s.traj_id = traj.id;
  s.start = range.start;
  s.end = range.end;
  if (range.length() >= 2) {
    s.relpath = to_relative(std::span<const Point2>(traj.track).subspan(range.start, range.length()));
  }
  if (traj.embeddings && traj.embeddings->table) s.embeddings = traj.embeddings->table;
  return s;
}

std::vector<FrameRange> kinematic_ranges(std::span<const double> kin, double epsilon, std::size_t min_len) {
  std::vector<FrameRange> out;
  std::size_t t = 0;
  while (t < kin.size()) {
    while (t < kin.size() && kin[t] < epsilon) ++t;
    const std::size_t start = t;
    while (t < kin.size() && kin[t] >= epsilon) ++t;
    if (t > start && t - start >= min_len) out.push_back({start, t});
  }
  return out;
}

std::vector<Segment> segment_kinematic(const Trajectory& traj, double epsilon, std::size_t min_len) {
  if (!traj.kin) throw Error(Errc::missing_kinematics, "trajectory '" + traj.id + "' has no kin values");
  if (!(epsilon > 0.0)) throw Error(Errc::invalid_argument, "epsilon must be > 0");
  std::vector<Segment> out;
  for (const auto& r : kinematic_ranges(*traj.kin, epsilon, min_len)) out.push_back(make_segment(traj, r));
  return out;
}

std::vector<FrameRange> even_ranges(std::size_t frames, std::size_t n, std::size_t min_len) {
  if (n == 0) throw Error(Errc::infeasible_split, "split count must be >= 1");
  if (min_len == 0 || n > frames / min_len) {
    throw Error(Errc::infeasible_split, "cannot split " + std::to_string(frames) + " frames into " +
                                            std::to_string(n) + " segments of at least " + std::to_string(min_len));
  }
  const std::size_t base = frames / n;
  const std::size_t extra = frames % n;
  std::vector<FrameRange> out;
  out.reserve(n);
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    out.push_back({start, start + len});
    start += len;
  }
  return out;
}

std::vector<Segment> split_even(const Trajectory& traj, std::size_t n, std::size_t min_len) {
  std::vector<Segment> out;
  for (const auto& r : even_ranges(traj.frames(), n, min_len)) out.push_back(make_segment(traj, r));
  return out;
}

double default_epsilon(std::span<const Trajectory> dataset) {
  std::vector<double> values;
  for (const auto& t : dataset) {
    if (t.kin) values.insert(values.end(), t.kin->begin(), t.kin->end());
  }
  if (values.empty()) throw Error(Errc::missing_kinematics, "no kin values to derive a default epsilon from");
  std::sort(values.begin(), values.end());
  const double pos = 0.1 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  const double p10 = values[lo] + frac * (values[hi] - values[lo]);
  if (p10 > 0.0) return p10;
  auto it = std::upper_bound(values.begin(), values.end(), 0.0);
  if (it == values.end()) throw Error(Errc::invalid_argument, "all kin values are zero; pass an explicit epsilon");
  return *it;
}

}  // namespace handrv
