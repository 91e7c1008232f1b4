#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "seqmatch/core.hpp"

namespace seqmatch {

// Keeps the first floor(keep_frac * T~) frames, then keeps every speedup-th
// frame of the remainder counting back from the final frame (so the final
// frame is always kept and the tail shrinks to ceil(len / speedup)).
Trajectory subsample_tail(const Trajectory& demo, double keep_frac, int speedup);

enum class SpeedChange { Faster, Slower };

SpeedChange parse_speed_change(std::string_view name);
std::string_view speed_change_name(SpeedChange s);

inline constexpr std::array<int, 5> kSpeedupFactors{2, 4, 6, 8, 10};
inline constexpr std::array<int, 5> kSlowdownFactors{2, 3, 4, 5, 6};

struct PerturbSpec {
  std::uint64_t seed = 0;
  int n_segments = 5;
  // 0 leaves the demonstration untouched; the protocol uses 1 or 3.
  int segments_changed = 1;
  SpeedChange direction = SpeedChange::Faster;
};

struct SegmentChange {
  std::size_t segment = 0;
  int factor = 1;
};

struct PerturbResult {
  Trajectory demo;
  double mad = 0.0;
  std::vector<SegmentChange> changes;
  std::vector<std::size_t> segment_lengths;
};

// Lengths of n near-equal segments; the remainder goes to the last one.
std::vector<std::size_t> split_lengths(std::size_t total, int n_segments);

double mean_absolute_deviation(std::span<const std::size_t> lengths);

// Speeds up (uniform decimation keeping a segment's endpoints) or slows
// down (each frame repeated factor times) randomly chosen segments.
PerturbResult perturb_segments(const Trajectory& demo, const PerturbSpec& spec);

enum class MisalignLevel { Low, High };
std::string_view level_name(MisalignLevel level);

struct PerturbedDemo {
  PerturbSpec spec;
  PerturbResult result;
  MisalignLevel level = MisalignLevel::Low;
};

// Sorts by MAD ascending (seed breaks ties); the lower half is Low.
std::vector<PerturbedDemo> rank_misalignment(std::vector<PerturbedDemo> batch);

// The standard batch: half the demos change one segment, half change three,
// seeds base_seed, base_seed + 1, ...; returned ranked.
std::vector<PerturbedDemo> perturbation_batch(const Trajectory& demo, SpeedChange direction,
                                              std::uint64_t base_seed, int batch_size = 6);

}  // namespace seqmatch
