#include "seqmatch/misalign.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "seqmatch/error.hpp"

namespace seqmatch {

Trajectory subsample_tail(const Trajectory& demo, double keep_frac, int speedup) {
  if (demo.empty()) throw InvalidInput("subsample_tail needs a non-empty demonstration");
  if (!(keep_frac > 0.0 && keep_frac < 1.0)) throw InvalidInput("keep_frac must lie in (0, 1)");
  if (speedup < 5 || speedup > 10) throw InvalidInput("speedup must lie in [5, 10]");
  const std::size_t n = demo.size();
  const auto head = static_cast<std::size_t>(std::floor(keep_frac * static_cast<double>(n)));

  std::vector<FrameEmbedding> frames(demo.frames().begin(), demo.frames().begin() + head);
  std::vector<FrameEmbedding> tail;
  for (std::size_t k = 0; k <= n - 1 - head; k += static_cast<std::size_t>(speedup)) tail.push_back(demo[n - 1 - k]);
  frames.insert(frames.end(), tail.rbegin(), tail.rend());
  if (frames.empty()) throw InvalidInput("subsampling produced an empty demonstration");
  return Trajectory(std::move(frames));
}

SpeedChange parse_speed_change(std::string_view name) {
  if (name == "faster") return SpeedChange::Faster;
  if (name == "slower") return SpeedChange::Slower;
  throw InvalidInput("unknown speed change '" + std::string(name) + "'");
}

std::string_view speed_change_name(SpeedChange s) { return s == SpeedChange::Faster ? "faster" : "slower"; }

std::string_view level_name(MisalignLevel level) { return level == MisalignLevel::Low ? "Low" : "High"; }

std::vector<std::size_t> split_lengths(std::size_t total, int n_segments) {
  if (n_segments < 1) throw InvalidInput("n_segments must be >= 1");
  const auto n = static_cast<std::size_t>(n_segments);
  if (total < n) throw InvalidInput("demonstration shorter than the number of segments");
  std::vector<std::size_t> lengths(n, total / n);
  lengths.back() += total % n;
  return lengths;
}

double mean_absolute_deviation(std::span<const std::size_t> lengths) {
  if (lengths.empty()) return 0.0;
  const double mean =
      std::accumulate(lengths.begin(), lengths.end(), 0.0) / static_cast<double>(lengths.size());
  double dev = 0.0;
  for (std::size_t len : lengths) dev += std::abs(static_cast<double>(len) - mean);
  return dev / static_cast<double>(lengths.size());
}

namespace {

// Unbiased enough for the tiny ranges used here and, unlike the standard
// distributions, identical across standard library implementations.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// Offsets kept when decimating a segment of length len by factor: ceil(len /
// factor) evenly spaced frames including both endpoints. A lone survivor is
// the segment's last frame, except in the opening segment, which keeps the
// demonstration's first frame instead (both, if it is also the last one).
std::vector<std::size_t> decimation_offsets(std::size_t len, int factor, bool opening, bool closing) {
  const std::size_t f = static_cast<std::size_t>(factor);
  const std::size_t count = (len + f - 1) / f;
  if (count <= 1) {
    if (opening && closing && len > 1) return {0, len - 1};
    return {opening ? 0 : len - 1};
  }
  std::vector<std::size_t> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = (2 * k * (len - 1) + (count - 1)) / (2 * (count - 1));
  return out;
}

}  // namespace

PerturbResult perturb_segments(const Trajectory& demo, const PerturbSpec& spec) {
  if (demo.empty()) throw InvalidInput("perturb_segments needs a non-empty demonstration");
  if (spec.segments_changed < 0 || spec.segments_changed > spec.n_segments) {
    throw InvalidInput("segments_changed must lie in [0, n_segments]");
  }
  const std::vector<std::size_t> lengths = split_lengths(demo.size(), spec.n_segments);

  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with the portable draw.
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[draw_index(rng, i)]);
  std::vector<std::size_t> chosen(order.begin(), order.begin() + spec.segments_changed);
  std::sort(chosen.begin(), chosen.end());

  const auto& factors = spec.direction == SpeedChange::Faster ? kSpeedupFactors : kSlowdownFactors;
  PerturbResult out;
  for (std::size_t seg : chosen) out.changes.push_back({seg, factors[draw_index(rng, factors.size())]});

  std::vector<FrameEmbedding> frames;
  std::size_t begin = 0;
  std::size_t next_change = 0;
  for (std::size_t seg = 0; seg < lengths.size(); ++seg) {
    const std::size_t len = lengths[seg];
    const std::size_t before = frames.size();
    if (next_change < out.changes.size() && out.changes[next_change].segment == seg) {
      const int factor = out.changes[next_change++].factor;
      if (spec.direction == SpeedChange::Faster) {
        for (std::size_t off : decimation_offsets(len, factor, seg == 0, seg + 1 == lengths.size())) frames.push_back(demo[begin + off]);
      } else {
        for (std::size_t k = 0; k < len; ++k) {
          for (int r = 0; r < factor; ++r) frames.push_back(demo[begin + k]);
        }
      }
    } else {
      for (std::size_t k = 0; k < len; ++k) frames.push_back(demo[begin + k]);
    }
    out.segment_lengths.push_back(frames.size() - before);
    begin += len;
  }
  out.mad = mean_absolute_deviation(out.segment_lengths);
  out.demo = Trajectory(std::move(frames));
  return out;
}

std::vector<PerturbedDemo> rank_misalignment(std::vector<PerturbedDemo> batch) {
  if (batch.size() < 2) throw InvalidInput("ranking needs at least two perturbed demonstrations");
  std::stable_sort(batch.begin(), batch.end(), [](const PerturbedDemo& a, const PerturbedDemo& b) {
    if (a.result.mad != b.result.mad) return a.result.mad < b.result.mad;
    return a.spec.seed < b.spec.seed;
  });
  const std::size_t low = batch.size() / 2;
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i].level = i < low ? MisalignLevel::Low : MisalignLevel::High;
  return batch;
}

std::vector<PerturbedDemo> perturbation_batch(const Trajectory& demo, SpeedChange direction,
                                              std::uint64_t base_seed, int batch_size) {
  if (batch_size < 2) throw InvalidInput("batch size must be >= 2");
  std::vector<PerturbedDemo> batch;
  for (int i = 0; i < batch_size; ++i) {
    PerturbedDemo pd;
    pd.spec.seed = base_seed + static_cast<std::uint64_t>(i);
    pd.spec.segments_changed = i < batch_size / 2 ? 1 : 3;
    pd.spec.direction = direction;
    pd.result = perturb_segments(demo, pd.spec);
    batch.push_back(std::move(pd));
  }
  return rank_misalignment(std::move(batch));
}

}  // namespace seqmatch
