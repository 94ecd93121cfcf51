#include "handrv/visfilter.hpp"

#include <algorithm>
#include <tuple>

#include "handrv/error.hpp"
#include "handrv/parallel.hpp"

namespace handrv {

namespace {

const EmbeddingTable& require_table(const Segment& s) {
  if (!s.embeddings) {
    throw Error(Errc::missing_embeddings, "segment of '" + s.traj_id + "' at frame " + std::to_string(s.start) +
                                              " has no embeddings");
  }
  return *s.embeddings;
}

bool ranks_before(const VisualCandidate& a, const VisualCandidate& b, std::span<const Segment> candidates) {
  const auto& sa = candidates[a.index];
  const auto& sb = candidates[b.index];
  return std::tie(a.cost.value, sa.traj_id, sa.start, a.index) < std::tie(b.cost.value, sb.traj_id, sb.start, b.index);
}

}  // namespace

std::size_t nearest_row(const EmbeddingTable& table, std::size_t frame) {
  if (table.rows() == 0) throw Error(Errc::missing_embeddings, "embedding table is empty");
  const std::size_t lower = std::min(frame / table.stride(), table.rows() - 1);
  if (lower + 1 >= table.rows()) return lower;
  const std::size_t below = frame - table.frame_of_row(lower);
  const std::size_t above = table.frame_of_row(lower + 1) - frame;
  return above < below ? lower + 1 : lower;
}

std::span<const float> boundary_embedding(const EmbeddingTable& table, std::size_t frame) {
  return table.row(nearest_row(table, frame));
}

std::vector<float> boundary_embedding(const Trajectory& traj, std::size_t frame) {
  if (!traj.embeddings) throw Error(Errc::missing_embeddings, "trajectory '" + traj.id + "' has no embeddings");
  if (frame >= traj.frames()) throw Error(Errc::invalid_argument, "frame out of range for '" + traj.id + "'");
  if (traj.embeddings->table) {
    const auto row = boundary_embedding(*traj.embeddings->table, frame);
    return {row.begin(), row.end()};
  }
  const EmbeddingTable table = load_embeddings(traj);
  const auto row = boundary_embedding(table, frame);
  return {row.begin(), row.end()};
}

double squared_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::incompatible_embeddings,
                "embedding dims differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

VisualCost visual_cost(const Segment& q, const Segment& r) {
  const auto& tq = require_table(q);
  const auto& tr = require_table(r);
  if (tq.dim() != tr.dim()) {
    throw Error(Errc::incompatible_embeddings,
                "embedding dims differ (" + std::to_string(tq.dim()) + " vs " + std::to_string(tr.dim()) + ")");
  }
  const double first = squared_distance(boundary_embedding(tq, q.start), boundary_embedding(tr, r.start));
  const double last = squared_distance(boundary_embedding(tq, q.end - 1), boundary_embedding(tr, r.end - 1));
  return {first + last};
}

std::vector<VisualCandidate> rank_visual(const Segment& q, std::span<const Segment> candidates, std::size_t M,
                                         unsigned threads) {
  if (M < 1) throw Error(Errc::invalid_argument, "M >= 1 violated");
  std::vector<VisualCandidate> scored(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    scored[i] = {i, visual_cost(q, candidates[i])};
  });
  const std::size_t keep = std::min(M, scored.size());
  auto before = [&](const VisualCandidate& a, const VisualCandidate& b) { return ranks_before(a, b, candidates); };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), before);
  scored.resize(keep);
  return scored;
}

std::vector<Segment> filter_top_m(const Segment& q, std::span<const Segment> candidates, std::size_t M) {
  std::vector<Segment> out;
  for (const auto& c : rank_visual(q, candidates, M)) out.push_back(candidates[c.index]);
  return out;
}

}  // namespace handrv
