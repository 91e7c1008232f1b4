#include "seqmatch/orca.hpp"

#include <algorithm>

#include "seqmatch/error.hpp"

namespace seqmatch {

namespace {

void check_probability(const Matrix& p) {
  if (p.empty()) throw InvalidInput("probability matrix is empty");
  for (double v : p.values()) {
    // Zero is tolerated: exp(-lambda * d) underflows for very large costs.
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("probability entries must lie in [0, 1]");
  }
}

}  // namespace

Matrix coverage_matrix(const Matrix& p) {
  check_probability(p);
  const std::size_t rows = p.rows(), cols = p.cols();
  Matrix c(rows, cols);

  c(0, 0) = p(0, 0);
  for (std::size_t j = 1; j < cols; ++j) c(0, j) = c(0, j - 1) * p(0, j);
  for (std::size_t t = 1; t < rows; ++t) c(t, 0) = std::max(c(t - 1, 0), p(t, 0));

  for (std::size_t t = 1; t < rows; ++t) {
    for (std::size_t j = 1; j < cols; ++j) {
      c(t, j) = std::max(c(t - 1, j), c(t, j - 1) * p(t, j));
    }
  }
  return c;
}

Matrix coverage_oracle(const Matrix& p) {
  check_probability(p);
  const std::size_t rows = p.rows(), cols = p.cols();
  Matrix c(rows, cols);
  // Column by column: column j only depends on column j-1.
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t t = 0; t < rows; ++t) {
      double best = 0.0;
      for (std::size_t i = 0; i <= t; ++i) {
        const double prev = j == 0 ? 1.0 : c(i, j - 1);
        best = std::max(best, prev * p(i, j));
      }
      c(t, j) = best;
    }
  }
  return c;
}

RewardSeries orca_rewards_from_probability(const Matrix& p) {
  check_probability(p);
  const std::size_t last = p.cols() - 1;
  RewardSeries rewards(p.rows());
  if (p.cols() == 1) {
    for (std::size_t t = 0; t < p.rows(); ++t) rewards[t] = p(t, 0);
    return rewards;
  }
  const Matrix c = coverage_matrix(p);
  for (std::size_t t = 0; t < p.rows(); ++t) rewards[t] = c(t, last - 1) * p(t, last);
  return rewards;
}

RewardSeries orca_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric, double lambda) {
  if (learner.empty() || demo.empty()) throw InvalidInput("orca_rewards needs non-empty trajectories");
  return orca_rewards_from_probability(probability_matrix(cost_matrix(learner, demo, metric), lambda));
}

}  // namespace seqmatch
