#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqmatch/core.hpp"
#include "seqmatch/rewards.hpp"
#include "seqmatch/rl.hpp"

namespace seqmatch::io {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "0.1.0";

// Full round-trip precision for every number we print.
std::string num(double v);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& content);

json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const json& doc);
Trajectory read_trajectory(const fs::path& path);
void write_trajectory(const fs::path& path, const Trajectory& traj);

json reward_params_to_json(const RewardParams& p);
RewardParams reward_params_from_json(const json& doc);

// Train config documents mirror TrainConfig, plus "task" (fixture name) and
// "seeds" (how many consecutive seeds to train). Unknown keys are rejected.
struct TrainDocument {
  TrainConfig config;
  std::string task = "tot_slow";
  int seeds = 1;
  bool has_seed = false;
};

json train_config_to_json(const TrainConfig& c);
TrainDocument train_document_from_json(const json& doc);

json policy_to_json(const QTable& q, const std::string& task);
QTable policy_from_json(const json& doc, std::string* task = nullptr);

json eval_summary_to_json(const EvalSummary& s);

std::string curve_csv(const std::vector<CurvePoint>& curve);
std::string reward_csv(const RewardSeries& r);

struct RunManifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};

// Writes manifest.json into dir, listing outputs in the order recorded.
void write_manifest(const fs::path& dir, const RunManifest& manifest);

// SEQMATCH_SEED, if set and parseable.
std::optional<std::uint64_t> env_seed();

}  // namespace seqmatch::io
