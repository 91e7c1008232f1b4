#include "seqmatch/rewards.hpp"

#include <string>

#include "seqmatch/dtw.hpp"
#include "seqmatch/error.hpp"
#include "seqmatch/threshold.hpp"

namespace seqmatch {

RewardFn parse_reward_fn(std::string_view name) {
  if (name == "orca") return RewardFn::Orca;
  if (name == "ot") return RewardFn::Ot;
  if (name == "tot" || name == "temporal_ot") return RewardFn::TemporalOt;
  if (name == "dtw") return RewardFn::Dtw;
  if (name == "threshold") return RewardFn::Threshold;
  if (name == "ground_truth") return RewardFn::GroundTruth;
  throw InvalidInput("unknown reward function '" + std::string(name) + "'");
}

std::string_view reward_fn_name(RewardFn fn) {
  switch (fn) {
    case RewardFn::Orca: return "orca";
    case RewardFn::Ot: return "ot";
    case RewardFn::TemporalOt: return "tot";
    case RewardFn::Dtw: return "dtw";
    case RewardFn::Threshold: return "threshold";
    case RewardFn::GroundTruth: return "ground_truth";
  }
  return "unknown";
}

RewardOutcome compute_rewards(RewardFn fn, const Trajectory& learner, const Trajectory& demo,
                              const RewardParams& params) {
  if (learner.empty() || demo.empty()) throw InvalidInput("reward functions need non-empty trajectories");
  if (fn == RewardFn::GroundTruth) return {ground_truth_rewards(learner, demo)};

  const Matrix cost = context_smooth(cost_matrix(learner, demo, params.metric), params.context_window);
  RewardOutcome out;
  const auto from_transport = [&out](TransportRewards&& tr) {
    out.rewards = std::move(tr.rewards);
    out.converged = tr.solve.converged;
    out.iterations = tr.solve.iterations;
    out.marginal_violation = tr.solve.marginal_violation;
  };
  SinkhornOptions sk{params.epsilon, params.max_iter, params.tol};

  switch (fn) {
    case RewardFn::Orca:
      out.rewards = orca_rewards_from_probability(probability_matrix(cost, params.lambda));
      break;
    case RewardFn::Ot:
      from_transport(ot_rewards_from_cost(cost, sk));
      break;
    case RewardFn::TemporalOt: {
      const int k_w = params.k_w.value_or(default_mask_window(demo.size(), params.aligned));
      from_transport(temporal_ot_rewards_from_cost(cost, sk, k_w));
      break;
    }
    case RewardFn::Dtw:
      out.rewards = dtw_rewards_from_cost(cost);
      break;
    case RewardFn::Threshold:
      out.rewards = threshold_trace(probability_matrix(cost, params.lambda), params.theta).rewards;
      break;
    case RewardFn::GroundTruth:
      break;
  }
  return out;
}

RewardSeries ground_truth_rewards(const Trajectory& learner, const Trajectory& demo) {
  if (learner.dim() != demo.dim()) throw InvalidInput("learner and demo dims differ");
  RewardSeries rewards(learner.size(), 0.0);
  std::size_t next = 0;
  for (std::size_t t = 0; t < learner.size(); ++t) {
    // Repeated demonstration frames are consumed by a single visit.
    while (next < demo.size() && learner[t] == demo[next]) ++next;
    if (next == demo.size() && learner[t] == demo[demo.size() - 1]) rewards[t] = 1.0;
  }
  return rewards;
}

}  // namespace seqmatch
