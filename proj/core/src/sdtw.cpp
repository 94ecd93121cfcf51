#include "handrv/sdtw.hpp"

#include <cmath>
#include <limits>

#include "handrv/error.hpp"
#include "handrv/visfilter.hpp"
#include "sdtw_kernel.hpp"

namespace handrv {

namespace {

void require_nonempty(std::size_t q, std::size_t r) {
  if (q == 0 || r == 0) throw Error(Errc::degenerate_path, "S-DTW needs non-empty query and reference");
}

double delta_distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

MatchResult sdtw_match(const RelativePath& q, const RelativePath& r) {
  return sdtw_banded(q, r, kNoBand);
}

MatchResult sdtw_banded(const RelativePath& q, const RelativePath& r, std::size_t band) {
  require_nonempty(q.size(), r.size());
  if (band == 0) throw Error(Errc::invalid_argument, "band must be >= 1");
  return detail::subsequence_dtw(
      q.size(), r.size(), [&](std::size_t i, std::size_t j) { return delta_distance(q[i], r[j]); }, band);
}

double dtw_full(const RelativePath& q, const RelativePath& r) {
  require_nonempty(q.size(), r.size());
  const std::size_t n = q.size();
  const std::size_t m = r.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> D(n + 1, std::vector<double>(m + 1, inf));
  D[0][0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const double best = std::min({D[i - 1][j - 1], D[i - 1][j], D[i][j - 1]});
      D[i][j] = delta_distance(q[i - 1], r[j - 1]) + best;
    }
  }
  return D[n][m];
}

MatchResult sdtw_oracle(const RelativePath& q, const RelativePath& r) {
  require_nonempty(q.size(), r.size());
  MatchResult best{std::numeric_limits<double>::infinity(), 0, 0};
  for (std::size_t e = 1; e <= r.size(); ++e) {
    for (std::size_t s = 0; s < e; ++s) {
      RelativePath window;
      window.deltas.assign(r.deltas.begin() + static_cast<std::ptrdiff_t>(s),
                           r.deltas.begin() + static_cast<std::ptrdiff_t>(e));
      const double c = dtw_full(q, window);
      if (c < best.cost) best = {c, s, e};
    }
  }
  return best;
}

FeatureSequence frame_features(const Segment& s) {
  if (!s.embeddings) {
    throw Error(Errc::missing_embeddings, "segment of '" + s.traj_id + "' has no embeddings");
  }
  FeatureSequence out;
  out.reserve(s.length());
  for (std::size_t f = s.start; f < s.end; ++f) out.push_back(boundary_embedding(*s.embeddings, f));
  return out;
}

MatchResult sdtw_match(const FeatureSequence& q, const FeatureSequence& r) {
  require_nonempty(q.size(), r.size());
  if (q.front().size() != r.front().size()) {
    throw Error(Errc::incompatible_embeddings, "feature dims differ");
  }
  return detail::subsequence_dtw(
      q.size(), r.size(), [&](std::size_t i, std::size_t j) { return std::sqrt(squared_distance(q[i], r[j])); },
      kNoBand);
}

}  // namespace handrv
