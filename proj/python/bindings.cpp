#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "seqmatch/core.hpp"
#include "seqmatch/dtw.hpp"
#include "seqmatch/error.hpp"
#include "seqmatch/gridworld.hpp"
#include "seqmatch/misalign.hpp"
#include "seqmatch/orca.hpp"
#include "seqmatch/rewards.hpp"
#include "seqmatch/rl.hpp"
#include "seqmatch/threshold.hpp"
#include "seqmatch/transport.hpp"

namespace py = pybind11;
using namespace seqmatch;

namespace {

using Rows = std::vector<std::vector<double>>;

RewardParams make_params(const std::string& metric, double lambda, double epsilon, std::optional<int> k_w,
                         bool aligned, int context_window, double theta, int max_iter, double tol) {
  RewardParams p;
  p.metric = parse_metric(metric);
  p.lambda = lambda;
  p.epsilon = epsilon;
  p.k_w = k_w;
  p.aligned = aligned;
  p.context_window = context_window;
  p.theta = theta;
  p.max_iter = max_iter;
  p.tol = tol;
  return p;
}

std::vector<std::pair<int, int>> cells_out(const std::vector<Cell>& cells) {
  std::vector<std::pair<int, int>> out;
  for (const Cell& c : cells) out.emplace_back(c.x, c.y);
  return out;
}

py::dict eval_dict(const EvalSummary& s) {
  py::dict d;
  d["rollouts"] = s.rollouts;
  d["mean_return"] = s.mean_return;
  d["se_return"] = s.se_return;
  d["mean_normalized"] = s.mean_normalized;
  d["success_rate"] = s.success_rate;
  d["expert_return"] = s.expert_return;
  return d;
}

py::dict scenario_dict(const Scenario& s) {
  const ScenarioReport r = evaluate_scenario(s);
  py::dict plus, minus;
  for (const auto& [fn, series] : r.plus) plus[py::str(std::string(reward_fn_name(fn)))] = series;
  for (const auto& [fn, series] : r.minus) minus[py::str(std::string(reward_fn_name(fn)))] = series;
  py::list claims;
  for (const auto& c : r.claims) {
    py::dict cd;
    cd["statement"] = c.statement;
    cd["passed"] = c.passed;
    cd["plus_total"] = c.plus;
    cd["minus_total"] = c.minus;
    claims.append(cd);
  }
  py::dict d;
  d["name"] = r.name;
  d["passed"] = r.passed;
  d["demo"] = cells_out(s.demo_cells);
  d["xi_plus"] = cells_out(s.plus_cells);
  d["xi_minus"] = cells_out(s.minus_cells);
  d["plus"] = plus;
  d["minus"] = minus;
  d["claims"] = claims;
  return d;
}

}  // namespace

PYBIND11_MODULE(_seqmatch, m) {
  m.doc() = "Sequence-matching rewards: ordered coverage, OT, TemporalOT, DTW and threshold baselines.";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

  m.def(
      "cost_matrix",
      [](const Rows& learner, const Rows& demo, const std::string& metric) {
        return cost_matrix(Trajectory(learner), Trajectory(demo), parse_metric(metric)).to_rows();
      },
      py::arg("learner"), py::arg("demo"), py::arg("metric") = "manhattan");

  m.def(
      "coverage_matrix", [](const Rows& p) { return coverage_matrix(Matrix::from_rows(p)).to_rows(); },
      py::arg("probability"));
  m.def(
      "coverage_oracle", [](const Rows& p) { return coverage_oracle(Matrix::from_rows(p)).to_rows(); },
      py::arg("probability"));

  m.def(
      "rewards",
      [](const std::string& fn, const Rows& learner, const Rows& demo, const std::string& metric, double lambda,
         double epsilon, std::optional<int> k_w, bool aligned, int context_window, double theta, int max_iter,
         double tol) {
        const RewardOutcome r =
            compute_rewards(parse_reward_fn(fn), Trajectory(learner), Trajectory(demo),
                            make_params(metric, lambda, epsilon, k_w, aligned, context_window, theta, max_iter, tol));
        py::dict d;
        d["rewards"] = r.rewards;
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        d["marginal_violation"] = r.marginal_violation;
        return d;
      },
      py::arg("fn"), py::arg("learner"), py::arg("demo"), py::arg("metric") = "manhattan",
      py::arg("lambda_") = kDefaultLambda, py::arg("epsilon") = 1.0, py::arg("k_w") = py::none(),
      py::arg("aligned") = false, py::arg("context_window") = 1, py::arg("theta") = kManipulationThreshold,
      py::arg("max_iter") = 1000, py::arg("tol") = 1e-6);

  m.def(
      "sinkhorn",
      [](const Rows& cost, double epsilon, int max_iter, double tol, std::optional<int> k_w) {
        const Matrix c = Matrix::from_rows(cost);
        std::optional<Mask> mask;
        if (k_w) mask = build_mask(c.rows(), c.cols(), *k_w);
        const SinkhornResult r = sinkhorn(c, SinkhornOptions{epsilon, max_iter, tol}, mask ? &*mask : nullptr);
        py::dict d;
        d["coupling"] = r.coupling.to_rows();
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["marginal_violation"] = r.marginal_violation;
        return d;
      },
      py::arg("cost"), py::arg("epsilon") = 1.0, py::arg("max_iter") = 1000, py::arg("tol") = 1e-6,
      py::arg("k_w") = py::none());

  m.def(
      "build_mask",
      [](std::size_t rows, std::size_t cols, int k_w) {
        const Mask mask = build_mask(rows, cols, k_w);
        std::vector<std::vector<bool>> out(rows, std::vector<bool>(cols));
        for (std::size_t t = 0; t < rows; ++t) {
          for (std::size_t j = 0; j < cols; ++j) out[t][j] = mask(t, j);
        }
        return out;
      },
      py::arg("rows"), py::arg("cols"), py::arg("k_w"));

  m.def(
      "dtw_align",
      [](const Rows& cost) {
        const DtwAlignment a = dtw_align(Matrix::from_rows(cost));
        std::vector<std::pair<std::size_t, std::size_t>> path;
        for (const WarpStep& s : a.path) path.emplace_back(s.t, s.j);
        return py::make_tuple(path, a.total_cost);
      },
      py::arg("cost"));

  m.def(
      "threshold_trace",
      [](const Rows& p, double theta) {
        const ThresholdTrace tr = threshold_trace(Matrix::from_rows(p), theta);
        return py::make_tuple(tr.rewards, tr.tracked, tr.completed);
      },
      py::arg("probability"), py::arg("theta") = kManipulationThreshold);

  m.def("scenario_names", &scenario_names);
  m.def(
      "evaluate_scenario", [](const std::string& name) { return scenario_dict(scenario_by_name(name)); },
      py::arg("name"));

  m.def(
      "subsample_tail",
      [](const Rows& demo, double keep_frac, int speedup) {
        return subsample_tail(Trajectory(demo), keep_frac, speedup).frames();
      },
      py::arg("demo"), py::arg("keep_frac") = 0.2, py::arg("speedup") = 5);

  m.def(
      "perturbation_batch",
      [](const Rows& demo, const std::string& direction, std::uint64_t seed, int batch_size) {
        py::list out;
        for (const auto& pd : perturbation_batch(Trajectory(demo), parse_speed_change(direction), seed, batch_size)) {
          py::dict d;
          d["seed"] = pd.spec.seed;
          d["segments_changed"] = pd.spec.segments_changed;
          d["demo"] = pd.result.demo.frames();
          d["mad"] = pd.result.mad;
          d["segment_lengths"] = pd.result.segment_lengths;
          d["level"] = std::string(level_name(pd.level));
          out.append(d);
        }
        return out;
      },
      py::arg("demo"), py::arg("direction") = "faster", py::arg("seed") = 0, py::arg("batch_size") = 6);

  m.def("task_names", &task_names);

  m.def(
      "train",
      [](const std::string& task_name, const std::string& reward_fn, double pretrain_fraction,
         const std::string& pretrain_reward_fn, int episodes, double q_init, std::uint64_t seed,
         int eval_interval, int eval_seeds) {
        TrainConfig c;
        c.reward_fn = parse_reward_fn(reward_fn);
        c.pretrain_reward_fn = parse_reward_fn(pretrain_reward_fn);
        c.pretrain_fraction = pretrain_fraction;
        c.episodes = episodes;
        c.q_init = q_init;
        c.seed = seed;
        c.eval_interval = eval_interval;
        const GridTask task = task_by_name(task_name);
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(c, task);
        }
        py::list curve;
        for (const CurvePoint& p : r.curve) {
          py::dict d;
          d["episode"] = p.episode;
          d["eval_return"] = p.eval_return;
          d["eval_success"] = p.eval_success;
          d["reward_source"] = std::string(reward_fn_name(p.reward_source));
          curve.append(d);
        }
        py::dict d;
        d["curve"] = curve;
        d["eval"] = eval_dict(evaluate(r.policy, task, eval_seeds, seed));
        return d;
      },
      py::arg("task"), py::arg("reward_fn") = "orca", py::arg("pretrain_fraction") = 0.0,
      py::arg("pretrain_reward_fn") = "tot", py::arg("episodes") = 20000, py::arg("q_init") = 0.0,
      py::arg("seed") = 0, py::arg("eval_interval") = 1000, py::arg("eval_seeds") = 3);

  m.def(
      "evaluate_expert",
      [](const std::string& task_name) {
        const GridTask task = task_by_name(task_name);
        return eval_dict(evaluate_cells(task.expert_cells, task));
      },
      py::arg("task"));
}
