#include "seqmatch/threshold.hpp"

#include "seqmatch/error.hpp"

namespace seqmatch {

ThresholdTrace threshold_trace(const Matrix& probability, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidInput("threshold theta must lie in (0, 1)");
  if (probability.empty()) throw InvalidInput("threshold needs a non-empty probability matrix");
  const std::size_t last = probability.cols() - 1;
  ThresholdTrace trace;
  trace.rewards.reserve(probability.rows());
  trace.tracked.reserve(probability.rows());
  std::size_t current = 0;
  for (std::size_t t = 0; t < probability.rows(); ++t) {
    const double p = probability(t, current);
    trace.tracked.push_back(current);
    trace.rewards.push_back(static_cast<double>(current) + p);
    if (p >= theta) {
      // The final subgoal counts as completed but stays tracked.
      if (current == last) {
        trace.completed = last + 1;
      } else {
        ++current;
        trace.completed = current;
      }
    }
  }
  return trace;
}

RewardSeries threshold_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric,
                               const ThresholdConfig& config) {
  const Matrix p = probability_matrix(cost_matrix(learner, demo, metric), config.lambda);
  return threshold_trace(p, config.theta).rewards;
}

}  // namespace seqmatch
