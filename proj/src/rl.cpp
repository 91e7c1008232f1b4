#include "seqmatch/rl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqmatch/error.hpp"

namespace seqmatch {

int time_bucket(int t, int horizon, int buckets) {
  if (horizon < 1 || buckets < 1) throw InvalidInput("time_bucket needs horizon >= 1 and buckets >= 1");
  if (t < 0 || t >= horizon) throw InvalidInput("time step outside the episode");
  return static_cast<int>((static_cast<long long>(buckets) * t) / horizon);
}

QTable::QTable(int width, int height, int buckets, double init) : width_(width), height_(height), buckets_(buckets) {
  if (width < 1 || height < 1 || buckets < 1) throw InvalidInput("QTable dimensions must be >= 1");
  q_.assign(static_cast<std::size_t>(width) * height * buckets * kNumGridActions, init);
}

std::size_t QTable::index(const AugmentedState& s, GridAction a) const {
  if (s.cell.x < 0 || s.cell.y < 0 || s.cell.x >= width_ || s.cell.y >= height_ || s.time_bucket < 0 ||
      s.time_bucket >= buckets_) {
    throw InvalidInput("state outside the QTable");
  }
  const std::size_t cell = static_cast<std::size_t>(s.cell.y) * width_ + s.cell.x;
  return ((cell * buckets_) + s.time_bucket) * kNumGridActions + static_cast<std::size_t>(a);
}

double QTable::max_value(const AugmentedState& s) const {
  double best = get(s, kGridActions[0]);
  for (GridAction a : kGridActions) best = std::max(best, get(s, a));
  return best;
}

GridAction QTable::greedy(const AugmentedState& s, std::mt19937_64* rng) const {
  const double best = max_value(s);
  std::array<GridAction, kNumGridActions> ties{};
  std::size_t n = 0;
  for (GridAction a : kGridActions) {
    if (get(s, a) == best) ties[n++] = a;
  }
  if (rng == nullptr || n == 1) return ties[0];
  return ties[(*rng)() % n];
}

std::vector<QTable::Entry> QTable::nonzero_entries() const {
  std::vector<Entry> out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      for (int b = 0; b < buckets_; ++b) {
        for (GridAction a : kGridActions) {
          const AugmentedState s{{x, y}, b};
          const double v = get(s, a);
          if (v != 0.0) out.push_back({s, a, v});
        }
      }
    }
  }
  return out;
}

void TrainConfig::validate() const {
  if (episodes < 1) throw InvalidInput("episodes must be >= 1");
  if (horizon < 0) throw InvalidInput("horizon must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidInput("gamma must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
    throw InvalidInput("exploration rates must lie in [0, 1]");
  }
  if (!(epsilon_decay_fraction >= 0.0 && epsilon_decay_fraction <= 1.0)) {
    throw InvalidInput("epsilon_decay_fraction must lie in [0, 1]");
  }
  if (!(pretrain_fraction >= 0.0 && pretrain_fraction <= 1.0)) {
    throw InvalidInput("pretrain_fraction must lie in [0, 1]");
  }
  if (!std::isfinite(q_init)) throw InvalidInput("q_init must be finite");
  if (time_buckets < 0) throw InvalidInput("time_buckets must be >= 0");
  if (eval_interval < 1) throw InvalidInput("eval_interval must be >= 1");
  if (eval_rollouts < 1) throw InvalidInput("eval_rollouts must be >= 1");
}

namespace {

int resolve_buckets(int buckets, int horizon) { return buckets == 0 ? horizon : buckets; }

}  // namespace

Episode rollout(const QTable& policy, const GridSpec& grid, int horizon, double exploration, std::mt19937_64& rng) {
  grid.validate();
  if (horizon < 1) throw InvalidInput("rollout horizon must be >= 1");
  if (policy.width() != grid.width || policy.height() != grid.height) {
    throw InvalidInput("QTable does not match the grid");
  }
  Episode ep;
  ep.cells.reserve(static_cast<std::size_t>(horizon));
  ep.cells.push_back(grid.start);
  for (int t = 0; t + 1 < horizon; ++t) {
    const AugmentedState s{ep.cells.back(), time_bucket(t, horizon, policy.buckets())};
    GridAction a;
    // Uniform draw in [0, 1) from the top 53 bits, portable across libraries.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < exploration) {
      a = kGridActions[rng() % kNumGridActions];
    } else {
      a = policy.greedy(s, &rng);
    }
    ep.actions.push_back(a);
    ep.cells.push_back(step(ep.cells.back(), a, grid));
  }
  return ep;
}

Episode rollout(const QTable& policy, const GridSpec& grid, int horizon, double exploration, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return rollout(policy, grid, horizon, exploration, rng);
}

RewardSeries relabel_and_update(QTable& q, const Episode& episode, const Trajectory& demo, RewardFn fn,
                                const TrainConfig& config) {
  if (episode.cells.empty() || episode.actions.size() + 1 != episode.cells.size()) {
    throw InvalidInput("episode must hold one more observation than actions");
  }
  const int horizon = static_cast<int>(episode.cells.size());
  const RewardOutcome outcome = compute_rewards(fn, to_trajectory(episode.cells), demo, config.reward_params);
  const RewardSeries& r = outcome.rewards;
  if (r.size() != episode.cells.size()) throw InternalError("reward length does not match the episode");

  // Transition t goes from observation t to t + 1 and earns the reward of
  // the observation it reaches; the last transition ends the episode.
  for (int t = 0; t + 1 < horizon; ++t) {
    const AugmentedState s{episode.cells[t], time_bucket(t, horizon, q.buckets())};
    const GridAction a = episode.actions[t];
    double target = r[t + 1];
    if (t + 2 < horizon) {
      const AugmentedState next{episode.cells[t + 1], time_bucket(t + 1, horizon, q.buckets())};
      target += config.gamma * q.max_value(next);
    }
    const double old = q.get(s, a);
    q.set(s, a, old + config.alpha * (target - old));
  }
  return r;
}

RewardFn reward_source_at(const TrainConfig& config, int episode) {
  return static_cast<double>(episode) < config.pretrain_fraction * static_cast<double>(config.episodes)
             ? config.pretrain_reward_fn
             : config.reward_fn;
}

namespace {

double exploration_at(const TrainConfig& c, int episode) {
  const double span = c.epsilon_decay_fraction * static_cast<double>(c.episodes);
  if (span <= 0.0 || episode >= span) return c.epsilon_end;
  const double frac = static_cast<double>(episode) / span;
  return c.epsilon_start + (c.epsilon_end - c.epsilon_start) * frac;
}

}  // namespace

TrainResult train(const TrainConfig& config, const GridTask& task) {
  config.validate();
  task.grid.validate();
  const int horizon = config.horizon == 0 ? task.grid.horizon : config.horizon;
  const Trajectory demo = task.demo();

  TrainResult out;
  out.policy = QTable(task.grid.width, task.grid.height, resolve_buckets(config.time_buckets, horizon), config.q_init);
  std::mt19937_64 rng(config.seed);
  for (int e = 0; e < config.episodes; ++e) {
    const RewardFn source = reward_source_at(config, e);
    const Episode ep = rollout(out.policy, task.grid, horizon, exploration_at(config, e), rng);
    relabel_and_update(out.policy, ep, demo, source, config);
    if ((e + 1) % config.eval_interval == 0 || e + 1 == config.episodes) {
      const EvalSummary s = evaluate(out.policy, task, config.eval_rollouts, config.seed, horizon);
      out.curve.push_back({e + 1, s.mean_return, s.success_rate, source});
    }
  }
  return out;
}

namespace {

struct RolloutScore {
  double ret = 0.0;
  bool success = false;
};

RolloutScore score(const std::vector<Cell>& cells, const Trajectory& demo) {
  const RewardSeries r = ground_truth_rewards(to_trajectory(cells), demo);
  return {std::accumulate(r.begin(), r.end(), 0.0), !r.empty() && r.back() == 1.0};
}

EvalSummary summarize(const std::vector<RolloutScore>& scores, double expert_return) {
  EvalSummary s;
  s.rollouts = static_cast<int>(scores.size());
  s.expert_return = expert_return;
  const double n = static_cast<double>(scores.size());
  for (const auto& sc : scores) {
    s.mean_return += sc.ret / n;
    s.success_rate += (sc.success ? 1.0 : 0.0) / n;
  }
  if (scores.size() > 1) {
    double var = 0.0;
    for (const auto& sc : scores) var += (sc.ret - s.mean_return) * (sc.ret - s.mean_return);
    var /= n - 1.0;
    s.se_return = std::sqrt(var / n);
  }
  s.mean_normalized = expert_return > 0.0 ? s.mean_return / expert_return : 0.0;
  return s;
}

}  // namespace

EvalSummary evaluate(const QTable& policy, const GridTask& task, int n_seeds, std::uint64_t seed, int horizon) {
  if (n_seeds < 1) throw InvalidInput("evaluation needs at least one rollout");
  const int h = horizon == 0 ? task.grid.horizon : horizon;
  const Trajectory demo = task.demo();
  std::vector<RolloutScore> scores;
  for (int i = 0; i < n_seeds; ++i) {
    const Episode ep = rollout(policy, task.grid, h, 0.0, seed + static_cast<std::uint64_t>(i));
    scores.push_back(score(ep.cells, demo));
  }
  return summarize(scores, score(task.expert_cells, demo).ret);
}

EvalSummary evaluate_cells(const std::vector<Cell>& cells, const GridTask& task) {
  const Trajectory demo = task.demo();
  return summarize({score(cells, demo)}, score(task.expert_cells, demo).ret);
}

}  // namespace seqmatch
