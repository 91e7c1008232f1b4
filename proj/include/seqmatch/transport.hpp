#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seqmatch/core.hpp"
#include "seqmatch/matrix.hpp"
#include "seqmatch/orca.hpp"

namespace seqmatch {

// Binary admissibility pattern for TemporalOT couplings.
class Mask {
 public:
  Mask(std::size_t rows, std::size_t cols, int half_width)
      : rows_(rows), cols_(cols), half_width_(half_width), bits_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int half_width() const { return half_width_; }

  bool operator()(std::size_t t, std::size_t j) const { return bits_[t * cols_ + j] != 0; }
  void set(std::size_t t, std::size_t j, bool on) { bits_[t * cols_ + j] = on ? 1 : 0; }

  std::size_t count() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  int half_width_;
  std::vector<std::uint8_t> bits_;
};

// Band of half-width k_w around the diagonal, stretched along the longer
// axis: for T >= T~ row t is centred on column round(t (T~-1)/(T-1)), and
// symmetrically for T < T~. Equal lengths give |t - j| <= k_w.
Mask build_mask(std::size_t learner_len, std::size_t demo_len, int k_w);

// 10 for temporally aligned demonstrations, ceil(T~/10) otherwise.
int default_mask_window(std::size_t demo_len, bool aligned);

struct SinkhornOptions {
  double epsilon = 1.0;
  int max_iter = 1000;
  double tol = 1e-6;
  // Geometric epsilon annealing from the cost scale down to epsilon, with
  // warm-started potentials. Needed for epsilon << cost scale.
  bool anneal = true;
};

struct SinkhornResult {
  Matrix coupling;
  int iterations = 0;
  // max over rows and columns of |marginal - target|.
  double marginal_violation = 0.0;
  bool converged = false;
};

// Entropic OT between uniform marginals (1/T rows, 1/T~ columns), solved by
// log-domain dual-potential updates. With a mask, entries outside the mask
// carry zero kernel weight and the coupling is exactly zero there.
// Non-convergence is reported in the result, not thrown.
SinkhornResult sinkhorn(const Matrix& cost, const SinkhornOptions& options, const Mask* mask = nullptr);

// The unregularized limit (epsilon = 0) is approximated by this value.
inline constexpr double kUnregularizedEpsilon = 1e-3;

struct TransportRewards {
  RewardSeries rewards;
  SinkhornResult solve;
};

// r_t = -sum_j cost(t,j) mu*(t,j).
RewardSeries coupling_rewards(const Matrix& cost, const Matrix& coupling);

TransportRewards ot_rewards_from_cost(const Matrix& cost, SinkhornOptions options);
TransportRewards temporal_ot_rewards_from_cost(const Matrix& cost, SinkhornOptions options, int k_w);

TransportRewards ot_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric,
                            SinkhornOptions options = {});
TransportRewards temporal_ot_rewards(const Trajectory& learner, const Trajectory& demo, Metric metric,
                                     SinkhornOptions options, int k_w);

}  // namespace seqmatch
