#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "seqmatch/gridworld.hpp"
#include "seqmatch/rewards.hpp"

namespace seqmatch {

// Grid cell plus elapsed-time bucket floor(B * t / horizon), so values can
// depend on how much of the episode is left.
struct AugmentedState {
  Cell cell;
  int time_bucket = 0;
};

int time_bucket(int t, int horizon, int buckets);

// Dense tabular action values over (cell, time bucket, action); unvisited
// entries read as 0.
class QTable {
 public:
  QTable() = default;
  QTable(int width, int height, int buckets, double init = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int buckets() const { return buckets_; }

  double get(const AugmentedState& s, GridAction a) const { return q_[index(s, a)]; }
  void set(const AugmentedState& s, GridAction a, double value) { q_[index(s, a)] = value; }
  double max_value(const AugmentedState& s) const;

  // Greedy action; ties broken uniformly at random when rng is given,
  // otherwise by action order.
  GridAction greedy(const AugmentedState& s, std::mt19937_64* rng = nullptr) const;

  struct Entry {
    AugmentedState state;
    GridAction action;
    double value;
  };
  std::vector<Entry> nonzero_entries() const;

  bool operator==(const QTable&) const = default;

 private:
  std::size_t index(const AugmentedState& s, GridAction a) const;

  int width_ = 0;
  int height_ = 0;
  int buckets_ = 0;
  std::vector<double> q_;
};

struct TrainConfig {
  RewardFn reward_fn = RewardFn::Orca;
  RewardFn pretrain_reward_fn = RewardFn::TemporalOt;
  // Episodes e < pretrain_fraction * episodes use pretrain_reward_fn.
  double pretrain_fraction = 0.5;
  int episodes = 20000;
  // 0 means the task's horizon.
  int horizon = 0;
  double gamma = 0.9;
  double alpha = 0.1;
  // Initial action value; optimistic values drive systematic exploration.
  double q_init = 0.0;
  // Epsilon-greedy, linear decay over epsilon_decay_fraction of the run.
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.4;
  std::uint64_t seed = 0;
  // 0 means one bucket per step.
  int time_buckets = 0;
  int eval_interval = 100;
  int eval_rollouts = 3;
  RewardParams reward_params;

  void validate() const;
};

struct Episode {
  std::vector<Cell> cells;  // horizon observations, starting at grid.start
  std::vector<GridAction> actions;  // horizon - 1 actions
};

Episode rollout(const QTable& policy, const GridSpec& grid, int horizon, double exploration, std::mt19937_64& rng);
Episode rollout(const QTable& policy, const GridSpec& grid, int horizon, double exploration, std::uint64_t seed);

// One-step Q-learning over the episode in time order, with every reward
// computed after the fact from the complete rollout. Returns the rewards.
RewardSeries relabel_and_update(QTable& q, const Episode& episode, const Trajectory& demo, RewardFn fn,
                                const TrainConfig& config);

// The reward function in force at episode e.
RewardFn reward_source_at(const TrainConfig& config, int episode);

struct CurvePoint {
  int episode = 0;
  double eval_return = 0.0;
  double eval_success = 0.0;
  RewardFn reward_source = RewardFn::Orca;
};

struct TrainResult {
  QTable policy;
  std::vector<CurvePoint> curve;
};

TrainResult train(const TrainConfig& config, const GridTask& task);

struct EvalSummary {
  int rollouts = 0;
  double mean_return = 0.0;
  double se_return = 0.0;
  double mean_normalized = 0.0;
  double success_rate = 0.0;
  double expert_return = 0.0;
};

// Greedy rollouts; the seed only drives tie-breaking between equal values
// since the dynamics and start cell are deterministic. Success means the
// final observation earns ground-truth reward.
EvalSummary evaluate(const QTable& policy, const GridTask& task, int n_seeds, std::uint64_t seed = 0,
                     int horizon = 0);

// Return and success of a fixed cell sequence, for scripted policies.
EvalSummary evaluate_cells(const std::vector<Cell>& cells, const GridTask& task);

}  // namespace seqmatch
