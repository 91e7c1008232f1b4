#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "seqmatch/error.hpp"

namespace seqmatch::io {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << content;
}

json trajectory_to_json(const Trajectory& traj) {
  json frames = json::array();
  for (const auto& f : traj.frames()) frames.push_back(f);
  return json{{"dim", traj.dim()}, {"frames", frames}};
}

Trajectory trajectory_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("frames")) {
    throw InvalidInput("trajectory JSON needs \"dim\" and \"frames\"");
  }
  if (!doc.at("dim").is_number_integer()) throw InvalidInput("\"dim\" must be an integer");
  const auto dim = doc.at("dim").get<long long>();
  if (!doc.at("frames").is_array()) throw InvalidInput("\"frames\" must be an array");
  std::vector<FrameEmbedding> frames;
  for (const auto& f : doc.at("frames")) {
    if (!f.is_array()) throw InvalidInput("each frame must be an array of numbers");
    FrameEmbedding e;
    for (const auto& v : f) {
      if (!v.is_number()) throw InvalidInput("frame entries must be numbers");
      e.push_back(v.get<double>());
    }
    if (static_cast<long long>(e.size()) != dim) {
      throw InvalidInput("frame " + std::to_string(frames.size()) + " does not have dim " + std::to_string(dim));
    }
    frames.push_back(std::move(e));
  }
  return Trajectory(std::move(frames));
}

Trajectory read_trajectory(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidInput("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    return trajectory_from_json(doc);
  } catch (const InvalidInput& e) {
    throw InvalidInput("'" + path.string() + "': " + e.what());
  }
}

void write_trajectory(const fs::path& path, const Trajectory& traj) {
  write_text(path, trajectory_to_json(traj).dump(2) + "\n");
}

json reward_params_to_json(const RewardParams& p) {
  json doc{{"metric", std::string(metric_name(p.metric))},
           {"lambda", p.lambda},
           {"epsilon", p.epsilon},
           {"aligned", p.aligned},
           {"context_window", p.context_window},
           {"theta", p.theta},
           {"max_iter", p.max_iter},
           {"tol", p.tol}};
  doc["k_w"] = p.k_w ? json(*p.k_w) : json(nullptr);
  return doc;
}

namespace {

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& where) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) throw InvalidInput("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void take(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("key '") + key + "' has the wrong type");
  }
}

RewardFn take_fn(const json& doc, const char* key, RewardFn fallback) {
  std::string name;
  take(doc, key, name);
  return name.empty() ? fallback : parse_reward_fn(name);
}

}  // namespace

RewardParams reward_params_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("reward_params must be an object");
  reject_unknown(doc, {"metric", "lambda", "epsilon", "k_w", "aligned", "context_window", "theta", "max_iter", "tol"},
                 "reward_params");
  RewardParams p;
  std::string metric;
  take(doc, "metric", metric);
  if (!metric.empty()) p.metric = parse_metric(metric);
  take(doc, "lambda", p.lambda);
  take(doc, "epsilon", p.epsilon);
  if (doc.contains("k_w") && !doc.at("k_w").is_null()) {
    int k = 0;
    take(doc, "k_w", k);
    p.k_w = k;
  }
  take(doc, "aligned", p.aligned);
  take(doc, "context_window", p.context_window);
  take(doc, "theta", p.theta);
  take(doc, "max_iter", p.max_iter);
  take(doc, "tol", p.tol);
  return p;
}

json train_config_to_json(const TrainConfig& c) {
  return json{{"reward_fn", std::string(reward_fn_name(c.reward_fn))},
              {"pretrain_reward_fn", std::string(reward_fn_name(c.pretrain_reward_fn))},
              {"pretrain_fraction", c.pretrain_fraction},
              {"episodes", c.episodes},
              {"horizon", c.horizon},
              {"gamma", c.gamma},
              {"alpha", c.alpha},
              {"q_init", c.q_init},
              {"epsilon_start", c.epsilon_start},
              {"epsilon_end", c.epsilon_end},
              {"epsilon_decay_fraction", c.epsilon_decay_fraction},
              {"seed", c.seed},
              {"time_buckets", c.time_buckets},
              {"eval_interval", c.eval_interval},
              {"eval_rollouts", c.eval_rollouts},
              {"reward_params", reward_params_to_json(c.reward_params)}};
}

TrainDocument train_document_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("train config must be a JSON object");
  reject_unknown(doc,
                 {"task", "seeds", "reward_fn", "pretrain_reward_fn", "pretrain_fraction", "episodes", "horizon",
                  "gamma", "alpha", "q_init", "epsilon_start", "epsilon_end", "epsilon_decay_fraction", "seed",
                  "time_buckets", "eval_interval", "eval_rollouts", "reward_params"},
                 "train config");
  TrainDocument out;
  TrainConfig& c = out.config;
  take(doc, "task", out.task);
  take(doc, "seeds", out.seeds);
  if (out.seeds < 1) throw InvalidInput("seeds must be >= 1");
  c.reward_fn = take_fn(doc, "reward_fn", c.reward_fn);
  c.pretrain_reward_fn = take_fn(doc, "pretrain_reward_fn", c.pretrain_reward_fn);
  take(doc, "pretrain_fraction", c.pretrain_fraction);
  take(doc, "episodes", c.episodes);
  take(doc, "horizon", c.horizon);
  take(doc, "gamma", c.gamma);
  take(doc, "alpha", c.alpha);
  take(doc, "q_init", c.q_init);
  take(doc, "epsilon_start", c.epsilon_start);
  take(doc, "epsilon_end", c.epsilon_end);
  take(doc, "epsilon_decay_fraction", c.epsilon_decay_fraction);
  out.has_seed = doc.contains("seed");
  take(doc, "seed", c.seed);
  take(doc, "time_buckets", c.time_buckets);
  take(doc, "eval_interval", c.eval_interval);
  take(doc, "eval_rollouts", c.eval_rollouts);
  if (doc.contains("reward_params")) c.reward_params = reward_params_from_json(doc.at("reward_params"));
  c.validate();
  return out;
}

json policy_to_json(const QTable& q, const std::string& task) {
  json entries = json::array();
  for (const auto& e : q.nonzero_entries()) {
    entries.push_back({{"x", e.state.cell.x},
                       {"y", e.state.cell.y},
                       {"time_bucket", e.state.time_bucket},
                       {"action", std::string(action_name(e.action))},
                       {"value", e.value}});
  }
  return json{{"task", task},
              {"width", q.width()},
              {"height", q.height()},
              {"time_buckets", q.buckets()},
              {"entries", entries}};
}

namespace {

GridAction parse_action(const std::string& name) {
  for (GridAction a : kGridActions) {
    if (action_name(a) == name) return a;
  }
  throw InvalidInput("unknown action '" + name + "'");
}

}  // namespace

QTable policy_from_json(const json& doc, std::string* task) {
  if (!doc.is_object()) throw InvalidInput("policy must be a JSON object");
  int width = 0, height = 0, buckets = 0;
  take(doc, "width", width);
  take(doc, "height", height);
  take(doc, "time_buckets", buckets);
  QTable q(width, height, buckets);
  if (task != nullptr) take(doc, "task", *task);
  if (!doc.contains("entries") || !doc.at("entries").is_array()) throw InvalidInput("policy needs an entries array");
  for (const auto& e : doc.at("entries")) {
    AugmentedState s;
    std::string action;
    double value = 0.0;
    take(e, "x", s.cell.x);
    take(e, "y", s.cell.y);
    take(e, "time_bucket", s.time_bucket);
    take(e, "action", action);
    take(e, "value", value);
    if (!std::isfinite(value)) throw InvalidInput("policy values must be finite");
    q.set(s, parse_action(action), value);
  }
  return q;
}

json eval_summary_to_json(const EvalSummary& s) {
  return json{{"rollouts", s.rollouts},
              {"mean_return", s.mean_return},
              {"se_return", s.se_return},
              {"mean_normalized", s.mean_normalized},
              {"success_rate", s.success_rate},
              {"expert_return", s.expert_return}};
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "episode,eval_return,eval_success,reward_source\n";
  for (const auto& p : curve) {
    out += std::to_string(p.episode) + "," + num(p.eval_return) + "," + num(p.eval_success) + "," +
           std::string(reward_fn_name(p.reward_source)) + "\n";
  }
  return out;
}

std::string reward_csv(const RewardSeries& r) {
  std::string out = "t,reward\n";
  for (std::size_t t = 0; t < r.size(); ++t) out += std::to_string(t) + "," + num(r[t]) + "\n";
  return out;
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  json doc{{"command", m.command},
           {"config", m.config},
           {"seed", m.seed},
           {"tool_version", kToolVersion},
           {"outputs", m.outputs}};
  write_text(dir / "manifest.json", doc.dump(2) + "\n");
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SEQMATCH_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') throw InvalidInput("SEQMATCH_SEED must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

}  // namespace seqmatch::io
