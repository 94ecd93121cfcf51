#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "handrv/pathops.hpp"
#include "handrv/trajdata.hpp"

namespace handrv {

/// Sum of squared embedding distances between the first frames and between
/// the last frames of two segments.
struct VisualCost {
  double value = 0.0;

  friend auto operator<=>(const VisualCost&, const VisualCost&) = default;
};

/// Index of the stored row whose frame is nearest to `frame`; ties go to the
/// earlier row.
std::size_t nearest_row(const EmbeddingTable& table, std::size_t frame);

std::span<const float> boundary_embedding(const EmbeddingTable& table, std::size_t frame);

/// Resolves the trajectory's embeddings (reading the blob if needed).
std::vector<float> boundary_embedding(const Trajectory& traj, std::size_t frame);

double squared_distance(std::span<const float> a, std::span<const float> b);

/// Uses frames start and end - 1 of each segment.
VisualCost visual_cost(const Segment& q, const Segment& r);

struct VisualCandidate {
  std::size_t index = 0;  // position in the candidate list
  VisualCost cost;
};

/// The min(M, |candidates|) candidates with lowest visual cost, ordered by
/// (cost, traj_id, start). threads = 0 uses the machine's parallelism.
std::vector<VisualCandidate> rank_visual(const Segment& q, std::span<const Segment> candidates, std::size_t M,
                                         unsigned threads = 1);

std::vector<Segment> filter_top_m(const Segment& q, std::span<const Segment> candidates, std::size_t M);

}  // namespace handrv
