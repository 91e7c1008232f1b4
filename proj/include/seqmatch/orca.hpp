#pragma once

#include <vector>

#include "seqmatch/core.hpp"
#include "seqmatch/matrix.hpp"

namespace seqmatch {

using RewardSeries = std::vector<double>;

// Ordered-coverage table. C(t,j) is the probability that learner frames
// 0..t have occupied demonstration frames 0..j in order:
//
//   C(t,j) = max(C(t-1,j), C(t,j-1) * P(t,j)),   C(t,-1) := 1, C(-1,j) := 0.
//
// Rows are nondecreasing in t and nonincreasing in j. Computed in linear
// probability space; products of many P < 1 underflow once the
// demonstration grows past a few hundred frames (validated for T~ <= 200).
Matrix coverage_matrix(const Matrix& probability);

// Closed form of the same table: C(t,j) = max_{i<=t} C(i,j-1) * P(i,j).
// Evaluates every max from scratch instead of carrying the running max, so
// it serves as an independent check on coverage_matrix.
Matrix coverage_oracle(const Matrix& probability);

// r_t = C(t, T~-2) * P(t, T~-1); with a single demonstration frame the
// empty-prefix coverage is 1 and r_t = P(t, 0).
RewardSeries orca_rewards_from_probability(const Matrix& probability);

RewardSeries orca_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric,
                          double lambda = kDefaultLambda);

}  // namespace seqmatch
