#include "seqmatch/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "seqmatch/error.hpp"

namespace seqmatch {

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

// round(num / den) with halves rounded up, for num, den >= 0.
std::size_t rounded_ratio(std::size_t num, std::size_t den) { return (2 * num + den) / (2 * den); }

std::size_t band_center(std::size_t index, std::size_t from_len, std::size_t to_len) {
  if (from_len <= 1) return 0;
  return rounded_ratio(index * (to_len - 1), from_len - 1);
}

}  // namespace

Mask build_mask(std::size_t learner_len, std::size_t demo_len, int k_w) {
  if (learner_len == 0 || demo_len == 0) throw InvalidInput("mask dimensions must be >= 1");
  if (k_w < 0) throw InvalidInput("mask half-width must be >= 0");
  Mask mask(learner_len, demo_len, k_w);
  const auto within = [k_w](std::size_t a, std::size_t b) {
    const auto gap = a > b ? a - b : b - a;
    return gap <= static_cast<std::size_t>(k_w);
  };
  for (std::size_t t = 0; t < learner_len; ++t) {
    for (std::size_t j = 0; j < demo_len; ++j) {
      const bool on = learner_len >= demo_len ? within(j, band_center(t, learner_len, demo_len))
                                              : within(t, band_center(j, demo_len, learner_len));
      mask.set(t, j, on);
    }
  }
  for (std::size_t t = 0; t < learner_len; ++t) {
    bool any = false;
    for (std::size_t j = 0; j < demo_len && !any; ++j) any = mask(t, j);
    if (!any) throw InvalidInput("mask row " + std::to_string(t) + " is empty");
  }
  for (std::size_t j = 0; j < demo_len; ++j) {
    bool any = false;
    for (std::size_t t = 0; t < learner_len && !any; ++t) any = mask(t, j);
    if (!any) throw InvalidInput("mask column " + std::to_string(j) + " is empty");
  }
  return mask;
}

int default_mask_window(std::size_t demo_len, bool aligned) {
  if (aligned) return 10;
  return static_cast<int>((demo_len + 9) / 10);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-domain state: f over rows, g over columns; coupling entries are
// exp((f_i + g_j - C_ij) / eps) on the support.
struct LogSinkhorn {
  const Matrix& cost;
  const Mask* mask;
  std::size_t rows, cols;
  double log_a, log_b;
  std::vector<double> f, g;
  std::vector<double> scratch;
  std::vector<double> scratch_f;

  LogSinkhorn(const Matrix& c, const Mask* m)
      : cost(c),
        mask(m),
        rows(c.rows()),
        cols(c.cols()),
        log_a(-std::log(static_cast<double>(c.rows()))),
        log_b(-std::log(static_cast<double>(c.cols()))),
        f(c.rows(), 0.0),
        g(c.cols(), 0.0),
        scratch(std::max(c.rows(), c.cols())),
        scratch_f(c.rows(), 0.0) {}

  bool on(std::size_t t, std::size_t j) const { return mask == nullptr || (*mask)(t, j); }

  static double log_sum_exp(std::span<const double> xs) {
    double hi = kNegInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double x : xs) sum += std::exp(x - hi);
    return hi + std::log(sum);
  }

  double row_lse(std::size_t t, double eps) {
    for (std::size_t j = 0; j < cols; ++j) scratch[j] = on(t, j) ? (g[j] - cost(t, j)) / eps : kNegInf;
    return log_sum_exp(std::span<const double>(scratch.data(), cols));
  }

  double col_lse(std::size_t j, double eps) {
    for (std::size_t t = 0; t < rows; ++t) scratch[t] = on(t, j) ? (f[t] - cost(t, j)) / eps : kNegInf;
    return log_sum_exp(std::span<const double>(scratch.data(), rows));
  }

  void update_g(double eps) {
    for (std::size_t j = 0; j < cols; ++j) g[j] = eps * (log_b - col_lse(j, eps));
  }

  void iterate(double eps) {
    for (std::size_t t = 0; t < rows; ++t) f[t] = eps * (log_a - row_lse(t, eps));
    update_g(eps);
  }

  // Row marginal violation of the current coupling, followed by the f half
  // of the next sweep (both need the same row log-sum-exps). Columns are
  // exact right after a g update, so rows are all that is left to check.
  double check_rows_then_update_f(double eps) {
    const double a = std::exp(log_a);
    double worst = 0.0;
    for (std::size_t t = 0; t < rows; ++t) {
      const double lse = row_lse(t, eps);
      worst = std::max(worst, std::abs(std::exp(f[t] / eps + lse) - a));
      scratch_f[t] = eps * (log_a - lse);
    }
    return worst;
  }

  void commit_f() { f.swap(scratch_f); }

  double violation(double eps) {
    const double a = std::exp(log_a), b = std::exp(log_b);
    double worst = 0.0;
    for (std::size_t t = 0; t < rows; ++t) worst = std::max(worst, std::abs(std::exp(f[t] / eps + row_lse(t, eps)) - a));
    for (std::size_t j = 0; j < cols; ++j) worst = std::max(worst, std::abs(std::exp(g[j] / eps + col_lse(j, eps)) - b));
    return worst;
  }

  Matrix coupling(double eps) const {
    Matrix mu(rows, cols);
    for (std::size_t t = 0; t < rows; ++t) {
      for (std::size_t j = 0; j < cols; ++j) {
        mu(t, j) = on(t, j) ? std::exp((f[t] + g[j] - cost(t, j)) / eps) : 0.0;
      }
    }
    return mu;
  }
};

}  // namespace

SinkhornResult sinkhorn(const Matrix& cost, const SinkhornOptions& options, const Mask* mask) {
  if (cost.empty()) throw InvalidInput("sinkhorn needs a non-empty cost matrix");
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) throw InvalidInput("epsilon must be > 0");
  if (options.max_iter < 1) throw InvalidInput("max_iter must be >= 1");
  if (!(options.tol > 0.0)) throw InvalidInput("tol must be > 0");
  if (mask != nullptr && (mask->rows() != cost.rows() || mask->cols() != cost.cols())) {
    throw InvalidInput("mask shape does not match cost shape");
  }
  double scale = 0.0;
  for (double v : cost.values()) {
    if (!std::isfinite(v)) throw InvalidInput("cost matrix contains a non-finite entry");
    scale = std::max(scale, std::abs(v));
  }

  LogSinkhorn solver(cost, mask);
  SinkhornResult result;

  if (options.anneal) {
    // Coarse stages: a handful of sweeps each, just enough to warm-start
    // the potentials for the next, smaller epsilon.
    constexpr int kStageSweeps = 20;
    double eps = scale;
    while (eps > 2.0 * options.epsilon && result.iterations < options.max_iter) {
      for (int k = 0; k < kStageSweeps && result.iterations < options.max_iter; ++k, ++result.iterations) {
        solver.iterate(eps);
      }
      eps *= 0.5;
    }
  }

  // The check needs potentials from at least one full sweep.
  bool swept = result.iterations > 0;
  while (true) {
    const double rows_off = solver.check_rows_then_update_f(options.epsilon);
    if (swept && rows_off < options.tol) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iter) break;
    solver.commit_f();
    solver.update_g(options.epsilon);
    ++result.iterations;
    swept = true;
  }
  result.marginal_violation = solver.violation(options.epsilon);
  result.coupling = solver.coupling(options.epsilon);
  return result;
}

RewardSeries coupling_rewards(const Matrix& cost, const Matrix& coupling) {
  if (cost.rows() != coupling.rows() || cost.cols() != coupling.cols()) {
    throw InvalidInput("cost and coupling shapes differ");
  }
  RewardSeries rewards(cost.rows(), 0.0);
  for (std::size_t t = 0; t < cost.rows(); ++t) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cost.cols(); ++j) sum += cost(t, j) * coupling(t, j);
    rewards[t] = -sum;
  }
  return rewards;
}

namespace {

SinkhornOptions resolve_epsilon(SinkhornOptions options) {
  if (options.epsilon == 0.0) options.epsilon = kUnregularizedEpsilon;
  return options;
}

}  // namespace

TransportRewards ot_rewards_from_cost(const Matrix& cost, SinkhornOptions options) {
  TransportRewards out;
  out.solve = sinkhorn(cost, resolve_epsilon(options));
  out.rewards = coupling_rewards(cost, out.solve.coupling);
  return out;
}

TransportRewards temporal_ot_rewards_from_cost(const Matrix& cost, SinkhornOptions options, int k_w) {
  const Mask mask = build_mask(cost.rows(), cost.cols(), k_w);
  TransportRewards out;
  out.solve = sinkhorn(cost, resolve_epsilon(options), &mask);
  out.rewards = coupling_rewards(cost, out.solve.coupling);
  return out;
}

TransportRewards ot_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric,
                            SinkhornOptions options) {
  return ot_rewards_from_cost(cost_matrix(learner, demo, metric), options);
}

TransportRewards temporal_ot_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric,
                                     SinkhornOptions options, int k_w) {
  return temporal_ot_rewards_from_cost(cost_matrix(learner, demo, metric), options, k_w);
}

}  // namespace seqmatch
