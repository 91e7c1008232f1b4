#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqmatch/matrix.hpp"

namespace seqmatch {

using FrameEmbedding = std::vector<double>;

// An ordered sequence of equal-dimension, finite frame embeddings. Used for
// both learner rollouts and demonstrations.
class Trajectory {
 public:
  Trajectory() = default;
  // Throws InvalidInput if frames is empty, dims differ, dim is 0, or any
  // entry is non-finite.
  explicit Trajectory(std::vector<FrameEmbedding> frames);

  std::size_t size() const { return frames_.size(); }
  std::size_t dim() const { return frames_.empty() ? 0 : frames_.front().size(); }
  bool empty() const { return frames_.empty(); }

  const FrameEmbedding& operator[](std::size_t t) const { return frames_[t]; }
  const std::vector<FrameEmbedding>& frames() const { return frames_; }

  // Frames [0, length). length must be in [1, size()].
  Trajectory prefix(std::size_t length) const;
  Trajectory reversed() const;

  bool operator==(const Trajectory&) const = default;

 private:
  std::vector<FrameEmbedding> frames_;
};

enum class Metric { Euclidean, Cosine, Manhattan };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);

double euclidean_distance(std::span<const double> a, std::span<const double> b);
// 1 - cos(a, b). Both vectors must be nonzero.
double cosine_distance(std::span<const double> a, std::span<const double> b);
double manhattan_distance(std::span<const double> a, std::span<const double> b);
double distance(Metric metric, std::span<const double> a, std::span<const double> b);

// T x T~ pairwise distances, rows = learner time, cols = demonstration time.
Matrix cost_matrix(const Trajectory& learner, const Trajectory& demo, Metric metric);

// Averages each entry with the next window-1 diagonal successors, clamping
// indices at the final row/column. window = 1 returns the input unchanged.
Matrix context_smooth(const Matrix& cost, int window);

// P(t,j) = exp(-lambda * cost(t,j)).
Matrix probability_matrix(const Matrix& cost, double lambda);

struct ConfidenceStats {
  double mean_reco = 0.0;
  double sigma_reco = 1.0;
  double k_sigma = 2.0;
};

// 1 below the mean offline reconstruction loss, Gaussian falloff above it.
double confidence_scale(double loss, const ConfidenceStats& stats);

inline constexpr int kDefaultContextWindow = 3;
inline constexpr double kDefaultLambda = 1.0;

}  // namespace seqmatch
