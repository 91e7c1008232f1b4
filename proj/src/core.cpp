#include "seqmatch/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqmatch/error.hpp"

namespace seqmatch {

Trajectory::Trajectory(std::vector<FrameEmbedding> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) throw InvalidInput("trajectory must contain at least one frame");
  const std::size_t d = frames_.front().size();
  if (d == 0) throw InvalidInput("frame dimension must be >= 1");
  for (std::size_t t = 0; t < frames_.size(); ++t) {
    if (frames_[t].size() != d) {
      throw InvalidInput("frame " + std::to_string(t) + " has dim " +
                         std::to_string(frames_[t].size()) + ", expected " + std::to_string(d));
    }
    for (double v : frames_[t]) {
      if (!std::isfinite(v)) throw InvalidInput("frame " + std::to_string(t) + " has a non-finite entry");
    }
  }
}

Trajectory Trajectory::prefix(std::size_t length) const {
  if (length == 0 || length > frames_.size()) throw InvalidInput("prefix length out of range");
  return Trajectory(std::vector<FrameEmbedding>(frames_.begin(), frames_.begin() + length));
}

Trajectory Trajectory::reversed() const {
  return Trajectory(std::vector<FrameEmbedding>(frames_.rbegin(), frames_.rend()));
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "cosine") return Metric::Cosine;
  if (name == "manhattan") return Metric::Manhattan;
  throw InvalidInput("unknown metric '" + std::string(name) + "'");
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Cosine: return "cosine";
    case Metric::Manhattan: return "manhattan";
  }
  return "unknown";
}

namespace {

void check_dims(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidInput("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

}  // namespace

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  check_dims(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  check_dims(a, b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw InvalidInput("cosine distance of a zero-norm vector");
  const double cos = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  // Identical directions can round to 1 - 1e-16; snap so d(a,a) == 0.
  const double d = 1.0 - cos;
  return d < 1e-15 ? 0.0 : d;
}

double manhattan_distance(std::span<const double> a, std::span<const double> b) {
  check_dims(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

double distance(Metric metric, std::span<const double> a, std::span<const double> b) {
  switch (metric) {
    case Metric::Euclidean: return euclidean_distance(a, b);
    case Metric::Cosine: return cosine_distance(a, b);
    case Metric::Manhattan: return manhattan_distance(a, b);
  }
  throw InvalidInput("unknown metric");
}

Matrix cost_matrix(const Trajectory& learner, const Trajectory& demo, Metric metric) {
  if (learner.empty() || demo.empty()) throw InvalidInput("cost_matrix needs non-empty trajectories");
  if (learner.dim() != demo.dim()) {
    throw InvalidInput("learner dim " + std::to_string(learner.dim()) + " != demo dim " +
                       std::to_string(demo.dim()));
  }
  Matrix cost(learner.size(), demo.size());
  for (std::size_t t = 0; t < learner.size(); ++t) {
    for (std::size_t j = 0; j < demo.size(); ++j) cost(t, j) = distance(metric, learner[t], demo[j]);
  }
  return cost;
}

Matrix context_smooth(const Matrix& cost, int window) {
  if (window < 1) throw InvalidInput("context window must be >= 1");
  if (window == 1 || cost.empty()) return cost;
  const std::size_t rows = cost.rows(), cols = cost.cols();
  Matrix out(rows, cols);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t j = 0; j < cols; ++j) {
      double sum = 0.0;
      for (int k = 0; k < window; ++k) {
        const std::size_t ti = std::min(t + static_cast<std::size_t>(k), rows - 1);
        const std::size_t ji = std::min(j + static_cast<std::size_t>(k), cols - 1);
        sum += cost(ti, ji);
      }
      out(t, j) = sum / window;
    }
  }
  return out;
}

Matrix probability_matrix(const Matrix& cost, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be a positive finite number");
  Matrix p(cost.rows(), cost.cols());
  auto src = cost.values();
  auto dst = p.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!(src[i] >= 0.0) || !std::isfinite(src[i])) throw InvalidInput("cost entries must be finite and >= 0");
    dst[i] = std::exp(-lambda * src[i]);
  }
  return p;
}

double confidence_scale(double loss, const ConfidenceStats& stats) {
  if (!(stats.sigma_reco > 0.0) || !(stats.k_sigma > 0.0)) {
    throw InvalidInput("confidence stats need sigma_reco > 0 and k_sigma > 0");
  }
  if (loss < stats.mean_reco) return 1.0;
  const double excess = loss - stats.mean_reco;
  const double spread = stats.sigma_reco * stats.k_sigma;
  return std::exp(-(excess * excess) / (2.0 * spread * spread));
}

}  // namespace seqmatch
