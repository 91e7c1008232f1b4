#include "seqmatch/dtw.hpp"

#include <algorithm>
#include <limits>

#include "seqmatch/error.hpp"

namespace seqmatch {

DtwAlignment dtw_align(const Matrix& cost) {
  if (cost.empty()) throw InvalidInput("dtw_align needs a non-empty cost matrix");
  const std::size_t rows = cost.rows(), cols = cost.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // acc is padded by one row/column of +inf so the recurrence has no edge cases.
  Matrix acc(rows + 1, cols + 1, kInf);
  acc(0, 0) = 0.0;
  for (std::size_t t = 1; t <= rows; ++t) {
    for (std::size_t j = 1; j <= cols; ++j) {
      const double best = std::min({acc(t - 1, j - 1), acc(t - 1, j), acc(t, j - 1)});
      acc(t, j) = cost(t - 1, j - 1) + best;
    }
  }

  DtwAlignment out;
  out.total_cost = acc(rows, cols);
  std::size_t t = rows, j = cols;
  out.path.push_back({t - 1, j - 1});
  while (t > 1 || j > 1) {
    const double diag = acc(t - 1, j - 1), up = acc(t - 1, j), left = acc(t, j - 1);
    const double best = std::min({diag, up, left});
    if (diag == best) {
      --t;
      --j;
    } else if (up == best) {
      --t;
    } else {
      --j;
    }
    out.path.push_back({t - 1, j - 1});
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

bool is_valid_warp_path(const WarpPath& path, std::size_t rows, std::size_t cols) {
  if (path.empty() || rows == 0 || cols == 0) return false;
  if (!(path.front() == WarpStep{0, 0}) || !(path.back() == WarpStep{rows - 1, cols - 1})) return false;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto& a = path[k - 1];
    const auto& b = path[k];
    if (b.t < a.t || b.j < a.j) return false;
    const std::size_t dt = b.t - a.t, dj = b.j - a.j;
    if (dt > 1 || dj > 1 || (dt == 0 && dj == 0)) return false;
  }
  return true;
}

RewardSeries dtw_rewards_from_cost(const Matrix& cost) {
  const DtwAlignment alignment = dtw_align(cost);
  RewardSeries rewards(cost.rows(), 0.0);
  for (const auto& step : alignment.path) rewards[step.t] -= cost(step.t, step.j);
  return rewards;
}

RewardSeries dtw_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric) {
  return dtw_rewards_from_cost(cost_matrix(learner, demo, metric));
}

}  // namespace seqmatch
