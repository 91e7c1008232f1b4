#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "io.hpp"
#include "seqmatch/error.hpp"
#include "seqmatch/misalign.hpp"
#include "seqmatch/rl.hpp"
#include "svg.hpp"

namespace seqmatch::cli {

namespace fs = std::filesystem;
using io::json;
using io::num;

namespace {

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs work(i) for i in [0, n) on up to jobs threads. Results must be written
// by index; the first exception (by index) is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& work) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          work(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct ParamFlags {
  std::string metric = "manhattan";
  double lambda = kDefaultLambda;
  double epsilon = 1.0;
  std::optional<int> k_w;
  bool aligned = false;
  // 1 (no smoothing) so raw per-frame rewards come out by default; the
  // library's recommended window is kDefaultContextWindow.
  int cw = 1;
  double theta = kManipulationThreshold;
  int max_iter = 1000;
  double tol = 1e-6;

  void add_to(CLI::App* app) {
    app->add_option("--metric", metric, "euclidean, cosine or manhattan")->capture_default_str();
    app->add_option("--lambda", lambda, "occupancy temperature")->capture_default_str();
    app->add_option("--epsilon", epsilon, "entropic weight (0 means 1e-3)")->capture_default_str();
    app->add_option("--kw", k_w, "TemporalOT mask half-width");
    app->add_flag("--aligned", aligned, "demo is temporally aligned (default window 10)");
    app->add_option("--cw", cw, "context window")->capture_default_str();
    app->add_option("--theta", theta, "threshold reward level")->capture_default_str();
    app->add_option("--max-iter", max_iter, "Sinkhorn iteration cap")->capture_default_str();
    app->add_option("--tol", tol, "Sinkhorn marginal tolerance")->capture_default_str();
  }

  RewardParams resolve() const {
    RewardParams p;
    p.metric = parse_metric(metric);
    p.lambda = lambda;
    p.epsilon = epsilon;
    p.k_w = k_w;
    p.aligned = aligned;
    p.context_window = cw;
    p.theta = theta;
    p.max_iter = max_iter;
    p.tol = tol;
    return p;
  }
};

RewardOutcome checked_rewards(RewardFn fn, const Trajectory& learner, const Trajectory& demo,
                              const RewardParams& params) {
  if (learner.dim() != demo.dim()) {
    throw InvalidInput("learner dim " + std::to_string(learner.dim()) + " does not match demo dim " +
                       std::to_string(demo.dim()));
  }
  RewardOutcome r = compute_rewards(fn, learner, demo, params);
  if (!r.converged) {
    throw NonConvergence(std::string(reward_fn_name(fn)) + ": Sinkhorn did not converge after " +
                         std::to_string(r.iterations) + " iterations (marginal violation " +
                         num(r.marginal_violation) + ", tol " + num(params.tol) + ")");
  }
  return r;
}

double sum(const RewardSeries& r) {
  double s = 0.0;
  for (double v : r) s += v;
  return s;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config = std::nullopt) {
  if (flag) return *flag;
  if (config) return *config;
  return io::env_seed().value_or(0);
}

// ---- reward -------------------------------------------------------------

struct RewardCmd {
  std::string learner, demo, fn = "orca", out_dir;
  ParamFlags params;
};

int cmd_reward(const RewardCmd& c, std::ostream& out) {
  const RewardFn fn = parse_reward_fn(c.fn);
  const RewardParams params = c.params.resolve();
  const Trajectory learner = io::read_trajectory(c.learner);
  const Trajectory demo = io::read_trajectory(c.demo);
  const RewardOutcome r = checked_rewards(fn, learner, demo, params);
  const std::string csv = io::reward_csv(r.rewards);
  if (c.out_dir.empty()) {
    out << csv;
    return kExitOk;
  }
  const fs::path dir = c.out_dir;
  const double total = sum(r.rewards);
  json summary{{"total", total},
               {"mean", total / static_cast<double>(r.rewards.size())},
               {"fn", std::string(reward_fn_name(fn))},
               {"params", io::reward_params_to_json(params)},
               {"iterations", r.iterations}};
  io::write_text(dir / "rewards.csv", csv);
  io::write_text(dir / "summary.json", summary.dump(2) + "\n");
  io::write_manifest(dir, {"reward",
                           json{{"learner", c.learner}, {"demo", c.demo}, {"fn", c.fn},
                                {"params", io::reward_params_to_json(params)}},
                           0,
                           {"rewards.csv", "summary.json"}});
  out << "total " << num(total) << "\n";
  return kExitOk;
}

// ---- compare ------------------------------------------------------------

constexpr RewardFn kCompared[] = {RewardFn::Orca, RewardFn::Ot, RewardFn::TemporalOt, RewardFn::Dtw,
                                  RewardFn::Threshold};

std::string column_name(RewardFn fn) { return fn == RewardFn::TemporalOt ? "temporal_ot" : std::string(reward_fn_name(fn)); }

struct CompareCmd {
  std::string learner, demo, out_dir;
  bool plot = false;
  ParamFlags params;
};

int cmd_compare(const CompareCmd& c, std::ostream& out) {
  const RewardParams params = c.params.resolve();
  const Trajectory learner = io::read_trajectory(c.learner);
  const Trajectory demo = io::read_trajectory(c.demo);
  std::vector<RewardSeries> cols;
  for (RewardFn fn : kCompared) cols.push_back(checked_rewards(fn, learner, demo, params).rewards);

  std::string csv = "t";
  for (RewardFn fn : kCompared) csv += "," + column_name(fn);
  csv += "\n";
  for (std::size_t t = 0; t < learner.size(); ++t) {
    csv += std::to_string(t);
    for (const auto& col : cols) csv += "," + num(col[t]);
    csv += "\n";
  }
  const fs::path dir = c.out_dir;
  std::vector<std::string> outputs{"compare.csv"};
  io::write_text(dir / "compare.csv", csv);
  if (c.plot) {
    std::vector<svg::Series> series;
    for (std::size_t k = 0; k < cols.size(); ++k) series.push_back({column_name(kCompared[k]), cols[k]});
    io::write_text(dir / "compare.svg", svg::line_chart(series, "per-step rewards"));
    outputs.push_back("compare.svg");
  }
  io::write_manifest(dir, {"compare",
                           json{{"learner", c.learner}, {"demo", c.demo}, {"plot", c.plot},
                                {"params", io::reward_params_to_json(params)}},
                           0,
                           outputs});
  out << "wrote " << (dir / "compare.csv").string() << "\n";
  return kExitOk;
}

// ---- scenario -----------------------------------------------------------

constexpr RewardFn kScenarioFns[] = {RewardFn::Orca, RewardFn::Ot, RewardFn::TemporalOt,
                                     RewardFn::Dtw, RewardFn::Threshold, RewardFn::GroundTruth};

std::string series_csv(const std::map<RewardFn, RewardSeries>& m) {
  std::string csv = "t";
  for (RewardFn fn : kScenarioFns) csv += "," + column_name(fn);
  csv += "\n";
  const std::size_t n = m.at(RewardFn::Orca).size();
  for (std::size_t t = 0; t < n; ++t) {
    csv += std::to_string(t);
    for (RewardFn fn : kScenarioFns) csv += "," + num(m.at(fn)[t]);
    csv += "\n";
  }
  return csv;
}

}  // namespace

int run_scenarios(const std::vector<Scenario>& scenarios, const fs::path& out_dir, int jobs,
                  const RewardParams& params, std::ostream& out) {
  std::vector<ScenarioReport> reports(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t i) { reports[i] = evaluate_scenario(scenarios[i], params); });

  json doc{{"scenarios", json::array()}};
  std::vector<std::string> outputs;
  bool all = true;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    const ScenarioReport& r = reports[i];
    if (!out_dir.empty()) {
      for (const auto& [suffix, traj] : {std::pair{"demo", s.demo()}, std::pair{"xi_plus", s.xi_plus()},
                                         std::pair{"xi_minus", s.xi_minus()}}) {
        const std::string file = s.name + "_" + suffix + ".json";
        io::write_trajectory(out_dir / file, traj);
        outputs.push_back(file);
      }
      io::write_text(out_dir / (s.name + "_xi_plus_rewards.csv"), series_csv(r.plus));
      io::write_text(out_dir / (s.name + "_xi_minus_rewards.csv"), series_csv(r.minus));
      outputs.push_back(s.name + "_xi_plus_rewards.csv");
      outputs.push_back(s.name + "_xi_minus_rewards.csv");
    }
    json claims = json::array();
    for (const auto& c : r.claims) {
      claims.push_back({{"statement", c.statement}, {"passed", c.passed}, {"plus_total", c.plus}, {"minus_total", c.minus}});
      out << (c.passed ? "PASS " : "FAIL ") << s.name << ": " << c.statement << " (xi+ " << num(c.plus) << ", xi- "
          << num(c.minus) << ")\n";
    }
    doc["scenarios"].push_back({{"name", s.name}, {"passed", r.passed}, {"claims", claims}});
    all = all && r.passed;
  }
  doc["passed"] = all;
  if (!out_dir.empty()) {
    io::write_text(out_dir / "report.json", doc.dump(2) + "\n");
    outputs.push_back("report.json");
    json names = json::array();
    for (const auto& s : scenarios) names.push_back(s.name);
    io::write_manifest(out_dir, {"scenario", json{{"scenarios", names}, {"params", io::reward_params_to_json(params)}},
                                 0, outputs});
  }
  return all ? kExitOk : kExitClaimFailure;
}

namespace {

struct ScenarioCmd {
  std::string name = "all", out_dir;
  int jobs = 1;
};

int cmd_scenario(const ScenarioCmd& c, std::ostream& out) {
  std::vector<Scenario> scenarios;
  if (c.name == "all") {
    for (const auto& n : scenario_names()) scenarios.push_back(scenario_by_name(n));
  } else {
    scenarios.push_back(scenario_by_name(c.name));
  }
  return run_scenarios(scenarios, c.out_dir, c.jobs, RewardParams{}, out);
}

// ---- perturb ------------------------------------------------------------

struct PerturbCmd {
  std::string demo, mode, out_dir, direction = "faster";
  double keep = 0.2;
  int speedup = 5;
  std::optional<std::uint64_t> seed;
  int batch = 6;
  int segments = 5;
};

std::string factors_field(const std::vector<SegmentChange>& changes) {
  std::string s;
  for (const auto& ch : changes) {
    if (!s.empty()) s += ';';
    s += std::to_string(ch.segment) + ":" + std::to_string(ch.factor);
  }
  return s;
}

int cmd_perturb(const PerturbCmd& c, std::ostream& out) {
  const Trajectory demo = io::read_trajectory(c.demo);
  const fs::path dir = c.out_dir;
  if (c.mode == "subsample") {
    const Trajectory sub = subsample_tail(demo, c.keep, c.speedup);
    io::write_trajectory(dir / "subsampled.json", sub);
    io::write_manifest(dir, {"perturb",
                             json{{"demo", c.demo}, {"mode", c.mode}, {"keep", c.keep}, {"speedup", c.speedup}},
                             0,
                             {"subsampled.json"}});
    out << "frames " << sub.size() << "\n";
    return kExitOk;
  }
  if (c.mode != "random") throw InvalidInput("--mode must be subsample or random");
  const std::uint64_t seed = resolve_seed(c.seed);
  const SpeedChange direction = parse_speed_change(c.direction);
  if (c.batch < 2) throw InvalidInput("--batch must be >= 2");

  // Same layout as perturbation_batch, with the segment count exposed.
  std::vector<PerturbedDemo> batch;
  for (int i = 0; i < c.batch; ++i) {
    PerturbedDemo pd;
    pd.spec.seed = seed + static_cast<std::uint64_t>(i);
    pd.spec.n_segments = c.segments;
    pd.spec.segments_changed = std::min(i < c.batch / 2 ? 1 : 3, c.segments);
    pd.spec.direction = direction;
    pd.result = perturb_segments(demo, pd.spec);
    batch.push_back(std::move(pd));
  }
  batch = rank_misalignment(std::move(batch));
  std::sort(batch.begin(), batch.end(), [](const auto& a, const auto& b) { return a.spec.seed < b.spec.seed; });

  std::string csv = "file,seed,direction,segments_changed,factors,frames,mad,label\n";
  std::vector<std::string> outputs;
  for (const auto& pd : batch) {
    const std::string file = "perturbed_" + std::to_string(pd.spec.seed) + ".json";
    io::write_trajectory(dir / file, pd.result.demo);
    outputs.push_back(file);
    csv += file + "," + std::to_string(pd.spec.seed) + "," + std::string(speed_change_name(direction)) + "," +
           std::to_string(pd.spec.segments_changed) + "," + factors_field(pd.result.changes) + "," +
           std::to_string(pd.result.demo.size()) + "," + num(pd.result.mad) + "," +
           std::string(level_name(pd.level)) + "\n";
  }
  io::write_text(dir / "perturbations.csv", csv);
  outputs.push_back("perturbations.csv");
  io::write_manifest(dir, {"perturb",
                           json{{"demo", c.demo}, {"mode", c.mode}, {"direction", c.direction}, {"batch", c.batch},
                                {"segments", c.segments}},
                           seed,
                           outputs});
  out << "wrote " << batch.size() << " perturbed demonstrations\n";
  return kExitOk;
}

// ---- train / eval -------------------------------------------------------

struct TrainCmd {
  std::string config, out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  int eval_seeds = 3;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  var /= static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

int cmd_train(const TrainCmd& c, std::ostream& out) {
  json raw;
  try {
    raw = json::parse(io::read_text(c.config));
  } catch (const json::parse_error& e) {
    throw InvalidInput("'" + c.config + "' is not valid JSON: " + e.what());
  }
  io::TrainDocument doc = io::train_document_from_json(raw);
  const GridTask task = task_by_name(doc.task);
  const std::uint64_t base = resolve_seed(c.seed, doc.has_seed ? std::optional(doc.config.seed) : std::nullopt);
  if (c.eval_seeds < 1) throw InvalidInput("--eval-seeds must be >= 1");

  const auto n = static_cast<std::size_t>(doc.seeds);
  std::vector<TrainResult> results(n);
  std::vector<EvalSummary> evals(n);
  parallel_for(n, c.jobs, [&](std::size_t k) {
    TrainConfig cfg = doc.config;
    cfg.seed = base + k;
    results[k] = train(cfg, task);
    evals[k] = evaluate(results[k].policy, task, c.eval_seeds, cfg.seed, cfg.horizon);
  });

  const fs::path dir = c.out_dir;
  std::vector<std::string> outputs;
  json per_seed = json::array();
  std::vector<double> success, normalized;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t s = base + k;
    const std::string curve = "curve_seed" + std::to_string(s) + ".csv";
    const std::string policy = "policy_seed" + std::to_string(s) + ".json";
    io::write_text(dir / curve, io::curve_csv(results[k].curve));
    io::write_text(dir / policy, io::policy_to_json(results[k].policy, task.name).dump() + "\n");
    outputs.push_back(curve);
    outputs.push_back(policy);
    json e = io::eval_summary_to_json(evals[k]);
    e["seed"] = s;
    per_seed.push_back(e);
    success.push_back(evals[k].success_rate);
    normalized.push_back(evals[k].mean_normalized);
  }
  json summary{{"task", task.name},
               {"reward_fn", std::string(reward_fn_name(doc.config.reward_fn))},
               {"pretrain_fraction", doc.config.pretrain_fraction},
               {"per_seed", per_seed},
               {"success_rate_mean", mean_of(success)},
               {"success_rate_se", se_of(success)},
               {"normalized_return_mean", mean_of(normalized)},
               {"normalized_return_se", se_of(normalized)}};
  io::write_text(dir / "summary.json", summary.dump(2) + "\n");
  outputs.push_back("summary.json");
  json snapshot = io::train_config_to_json(doc.config);
  snapshot.erase("seed");
  snapshot["task"] = doc.task;
  snapshot["seeds"] = doc.seeds;
  snapshot["eval_seeds"] = c.eval_seeds;
  io::write_manifest(dir, {"train", snapshot, base, outputs});
  out << "success " << num(mean_of(success)) << " +- " << num(se_of(success)) << "\n";
  return kExitOk;
}

struct EvalCmd {
  std::string policy, task, out_dir;
  int seeds = 3;
  bool expert = false;
  std::optional<std::uint64_t> seed;
};

int cmd_eval(const EvalCmd& c, std::ostream& out) {
  std::string task_name = c.task;
  EvalSummary summary;
  if (c.expert) {
    if (task_name.empty()) throw InvalidInput("--expert needs --task");
    const GridTask task = task_by_name(task_name);
    summary = evaluate_cells(task.expert_cells, task);
  } else {
    if (c.policy.empty()) throw InvalidInput("eval needs a policy file or --expert");
    json raw;
    try {
      raw = json::parse(io::read_text(c.policy));
    } catch (const json::parse_error& e) {
      throw InvalidInput("'" + c.policy + "' is not valid JSON: " + e.what());
    }
    std::string stored;
    const QTable q = io::policy_from_json(raw, &stored);
    if (task_name.empty()) task_name = stored;
    if (task_name.empty()) throw InvalidInput("policy names no task; pass --task");
    const GridTask task = task_by_name(task_name);
    const int horizon = q.buckets() == task.grid.horizon ? 0 : task.grid.horizon;
    summary = evaluate(q, task, c.seeds, resolve_seed(c.seed), horizon);
  }
  json doc = io::eval_summary_to_json(summary);
  doc["task"] = task_name;
  if (!c.out_dir.empty()) {
    const fs::path dir = c.out_dir;
    io::write_text(dir / "eval.json", doc.dump(2) + "\n");
    io::write_manifest(dir, {"eval",
                             json{{"policy", c.policy}, {"task", task_name}, {"seeds", c.seeds}, {"expert", c.expert}},
                             resolve_seed(c.seed),
                             {"eval.json"}});
  }
  out << doc.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequence-matching rewards for imitation from demonstrations"};
  app.name("seqmatch");
  app.require_subcommand(1);

  RewardCmd reward;
  auto* r = app.add_subcommand("reward", "per-step rewards of a learner trajectory against a demonstration");
  r->add_option("learner", reward.learner, "learner trajectory JSON")->required();
  r->add_option("demo", reward.demo, "demonstration trajectory JSON")->required();
  r->add_option("--fn", reward.fn, "orca, ot, tot, dtw or threshold")->capture_default_str();
  r->add_option("--out", reward.out_dir, "output directory (CSV to stdout if omitted)");
  reward.params.add_to(r);

  CompareCmd compare;
  auto* cm = app.add_subcommand("compare", "all five rewards side by side");
  cm->add_option("learner", compare.learner, "learner trajectory JSON")->required();
  cm->add_option("demo", compare.demo, "demonstration trajectory JSON")->required();
  cm->add_option("--out", compare.out_dir, "output directory")->required();
  cm->add_flag("--plot", compare.plot, "also write compare.svg");
  compare.params.add_to(cm);

  ScenarioCmd scenario;
  auto* sc = app.add_subcommand("scenario", "reproduce the counterexample fixtures and check their claims");
  sc->add_option("--name", scenario.name, "ot_ordering, dtw_stall, tot_slow or all")->capture_default_str();
  sc->add_option("--out", scenario.out_dir, "output directory");
  sc->add_option("--jobs", scenario.jobs, "worker threads")->capture_default_str();

  PerturbCmd perturb;
  auto* pt = app.add_subcommand("perturb", "temporally misaligned variants of a demonstration");
  pt->add_option("demo", perturb.demo, "demonstration trajectory JSON")->required();
  pt->add_option("--mode", perturb.mode, "subsample or random")->required();
  pt->add_option("--out", perturb.out_dir, "output directory")->required();
  pt->add_option("--keep", perturb.keep, "subsample: fraction kept at full rate")->capture_default_str();
  pt->add_option("--speedup", perturb.speedup, "subsample: tail keep stride")->capture_default_str();
  pt->add_option("--direction", perturb.direction, "random: faster or slower")->capture_default_str();
  pt->add_option("--seed", perturb.seed, "random: base seed (default SEQMATCH_SEED or 0)");
  pt->add_option("--batch", perturb.batch, "random: number of demonstrations")->capture_default_str();
  pt->add_option("--segments", perturb.segments, "random: segments per demonstration")->capture_default_str();

  TrainCmd trainc;
  auto* tr = app.add_subcommand("train", "tabular Q-learning on a gridworld task");
  tr->add_option("config", trainc.config, "train config JSON")->required();
  tr->add_option("--out", trainc.out_dir, "output directory")->required();
  tr->add_option("--seed", trainc.seed, "base seed (overrides the config)");
  tr->add_option("--jobs", trainc.jobs, "seeds trained concurrently")->capture_default_str();
  tr->add_option("--eval-seeds", trainc.eval_seeds, "greedy rollouts per trained policy")->capture_default_str();

  EvalCmd evalc;
  auto* ev = app.add_subcommand("eval", "ground-truth evaluation of a policy or the scripted expert");
  ev->add_option("policy", evalc.policy, "policy JSON written by train");
  ev->add_option("--task", evalc.task, "task name (default: the one stored in the policy)");
  ev->add_option("--seeds", evalc.seeds, "greedy rollouts")->capture_default_str();
  ev->add_flag("--expert", evalc.expert, "evaluate the task's scripted expert");
  ev->add_option("--seed", evalc.seed, "tie-break seed (default SEQMATCH_SEED or 0)");
  ev->add_option("--out", evalc.out_dir, "output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (r->parsed()) return cmd_reward(reward, out);
    if (cm->parsed()) return cmd_compare(compare, out);
    if (sc->parsed()) return cmd_scenario(scenario, out);
    if (pt->parsed()) return cmd_perturb(perturb, out);
    if (tr->parsed()) return cmd_train(trainc, out);
    if (ev->parsed()) return cmd_eval(evalc, out);
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace seqmatch::cli
