#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "seqmatch/core.hpp"
#include "seqmatch/matrix.hpp"
#include "seqmatch/orca.hpp"

namespace seqmatch {

struct WarpStep {
  std::size_t t = 0;
  std::size_t j = 0;
  bool operator==(const WarpStep&) const = default;
};

// Monotone, connected alignment from (0,0) to (T-1, T~-1).
using WarpPath = std::vector<WarpStep>;

struct DtwAlignment {
  WarpPath path;
  double total_cost = 0.0;
};

// Classic DTW with unit steps. Backtracking prefers the diagonal
// predecessor, then (t-1, j), then (t, j-1).
DtwAlignment dtw_align(const Matrix& cost);

bool is_valid_warp_path(const WarpPath& path, std::size_t rows, std::size_t cols);

// Binary path weights: r_t = -sum of cost(t, j) over path steps with row t.
RewardSeries dtw_rewards_from_cost(const Matrix& cost);
RewardSeries dtw_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric);

}  // namespace seqmatch
