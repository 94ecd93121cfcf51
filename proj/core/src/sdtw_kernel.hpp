#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "handrv/sdtw.hpp"

namespace handrv::detail {

// Two-row subsequence DTW. Each cell carries the reference index its best
// alignment started at, so no traceback matrix is needed. dist(i, j) is the
// local distance between query element i and reference element j (0-based).
template <class Dist>
MatchResult subsequence_dtw(std::size_t n, std::size_t m, Dist&& dist, std::size_t band) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

  std::vector<double> prev_cost(m + 1, 0.0), cur_cost(m + 1, inf);
  std::vector<std::size_t> prev_start(m + 1, none), cur_start(m + 1, none);

  for (std::size_t i = 1; i <= n; ++i) {
    cur_cost[0] = inf;
    cur_start[0] = none;
    for (std::size_t j = 1; j <= m; ++j) {
      double best_cost = inf;
      std::size_t best_start = none;
      auto consider = [&](double c, std::size_t s) {
        if (c == inf) return;
        if (band != kNoBand) {
          const std::size_t along_q = i - 1;
          const std::size_t along_r = j - 1 - s;
          const std::size_t off = along_q > along_r ? along_q - along_r : along_r - along_q;
          if (off > band) return;
        }
        if (c < best_cost || (c == best_cost && s < best_start)) {
          best_cost = c;
          best_start = s;
        }
      };
      if (i == 1) {
        // Predecessors in row 0 are free starts at this column.
        consider(0.0, j - 1);
      } else {
        if (j > 1) consider(prev_cost[j - 1], prev_start[j - 1]);
        consider(prev_cost[j], prev_start[j]);
      }
      if (j > 1) consider(cur_cost[j - 1], cur_start[j - 1]);

      if (best_start == none) {
        cur_cost[j] = inf;
        cur_start[j] = none;
      } else {
        cur_cost[j] = dist(i - 1, j - 1) + best_cost;
        cur_start[j] = best_start;
      }
    }
    prev_cost.swap(cur_cost);
    prev_start.swap(cur_start);
  }

  MatchResult out{inf, 0, 0};
  for (std::size_t j = 1; j <= m; ++j) {
    if (prev_cost[j] < out.cost) {
      out.cost = prev_cost[j];
      out.start = prev_start[j];
      out.end = j;
    }
  }
  return out;
}

}  // namespace handrv::detail
