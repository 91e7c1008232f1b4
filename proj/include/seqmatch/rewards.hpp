#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "seqmatch/core.hpp"
#include "seqmatch/orca.hpp"
#include "seqmatch/threshold.hpp"
#include "seqmatch/transport.hpp"

namespace seqmatch {

// GroundTruth is the privileged binary success signal; it is not a
// demonstration-matching reward and only appears in evaluation and in the
// RL harness' sanity runs.
enum class RewardFn { Orca, Ot, TemporalOt, Dtw, Threshold, GroundTruth };

RewardFn parse_reward_fn(std::string_view name);
std::string_view reward_fn_name(RewardFn fn);

struct RewardParams {
  Metric metric = Metric::Manhattan;
  double lambda = kDefaultLambda;
  // 0 is mapped to kUnregularizedEpsilon.
  double epsilon = 1.0;
  // TemporalOT half-width; unset means default_mask_window(T~, aligned).
  std::optional<int> k_w;
  bool aligned = false;
  // Applied to the cost matrix before every reward function.
  int context_window = 1;
  double theta = kManipulationThreshold;
  int max_iter = 1000;
  double tol = 1e-6;
};

struct RewardOutcome {
  RewardSeries rewards;
  // Transport solves only; the other functions always report converged.
  bool converged = true;
  int iterations = 0;
  double marginal_violation = 0.0;
};

RewardOutcome compute_rewards(RewardFn fn, const Trajectory& learner, const Trajectory& demo,
                              const RewardParams& params = {});

// 1 at every step where all demonstration frames have been visited in
// order (exact frame equality) and the learner sits on the final one.
RewardSeries ground_truth_rewards(const Trajectory& learner, const Trajectory& demo);

}  // namespace seqmatch
