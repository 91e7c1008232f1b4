#pragma once

#include <cstddef>
#include <vector>

#include "seqmatch/core.hpp"
#include "seqmatch/matrix.hpp"
#include "seqmatch/orca.hpp"

namespace seqmatch {

struct ThresholdConfig {
  double theta = 0.9;
  double lambda = kDefaultLambda;
};

inline constexpr double kManipulationThreshold = 0.90;
inline constexpr double kUnstableControlThreshold = 0.70;

struct ThresholdTrace {
  RewardSeries rewards;
  // 0-based subgoal being tracked when r_t was computed.
  std::vector<std::size_t> tracked;
  std::size_t completed = 0;
};

// Tracks one subgoal at a time: r_t = completed + P(t, current), and the
// tracker advances once P(t, current) >= theta.
ThresholdTrace threshold_trace(const Matrix& probability, double theta);

RewardSeries threshold_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric,
                               const ThresholdConfig& config = {});

}  // namespace seqmatch
