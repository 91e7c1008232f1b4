#include "seqmatch/gridworld.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "seqmatch/error.hpp"

namespace seqmatch {

void GridSpec::validate() const {
  if (width < 1 || height < 1) throw InvalidInput("grid width and height must be >= 1");
  if (!contains(start)) throw InvalidInput("grid start cell is out of bounds");
  if (horizon < 1) throw InvalidInput("grid horizon must be >= 1");
}

std::string_view action_name(GridAction a) {
  switch (a) {
    case GridAction::Up: return "up";
    case GridAction::Down: return "down";
    case GridAction::Left: return "left";
    case GridAction::Right: return "right";
    case GridAction::Stay: return "stay";
  }
  return "unknown";
}

Cell step(Cell state, GridAction action, const GridSpec& grid) {
  Cell next = state;
  switch (action) {
    case GridAction::Up: ++next.y; break;
    case GridAction::Down: --next.y; break;
    case GridAction::Left: --next.x; break;
    case GridAction::Right: ++next.x; break;
    case GridAction::Stay: break;
  }
  return grid.contains(next) ? next : state;
}

FrameEmbedding embed(Cell c) { return {static_cast<double>(c.x), static_cast<double>(c.y)}; }

Trajectory to_trajectory(const std::vector<Cell>& cells) {
  std::vector<FrameEmbedding> frames;
  frames.reserve(cells.size());
  for (const Cell& c : cells) frames.push_back(embed(c));
  return Trajectory(std::move(frames));
}

bool is_feasible(const std::vector<Cell>& cells, const GridSpec& grid) {
  if (cells.empty() || !(cells.front() == grid.start)) return false;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    if (!grid.contains(cells[t])) return false;
    if (t > 0 && std::abs(cells[t].x - cells[t - 1].x) + std::abs(cells[t].y - cells[t - 1].y) > 1) return false;
  }
  return true;
}

int ground_truth_return(const Trajectory& traj, const Trajectory& demo) {
  const RewardSeries r = ground_truth_rewards(traj, demo);
  return static_cast<int>(std::accumulate(r.begin(), r.end(), 0.0));
}

namespace {

std::vector<Cell> corridor(std::initializer_list<int> xs) {
  std::vector<Cell> out;
  for (int x : xs) out.push_back({x, 0});
  return out;
}

using Kind = ScenarioClaim::Kind;

}  // namespace

Scenario scenario_ot_ordering() {
  Scenario s;
  s.name = "ot_ordering";
  s.grid = GridSpec{5, 5, {0, 0}, 17};
  // The demonstrator jumps corner to corner, clockwise from the start.
  s.demo_cells = {{0, 4}, {4, 4}, {4, 0}, {0, 0}};
  s.plus_cells.push_back({0, 0});
  for (int y = 1; y <= 4; ++y) s.plus_cells.push_back({0, y});
  for (int x = 1; x <= 4; ++x) s.plus_cells.push_back({x, 4});
  for (int y = 3; y >= 0; --y) s.plus_cells.push_back({4, y});
  for (int x = 3; x >= 0; --x) s.plus_cells.push_back({x, 0});
  s.minus_cells.assign(s.plus_cells.rbegin(), s.plus_cells.rend());
  s.claims = {
      {Kind::EqualTotals, RewardFn::Ot, 1e-6, 0, 0, "OT totals of the clockwise loop and its reversal are equal"},
      {Kind::PlusStrictlyHigher, RewardFn::Orca, 0, 0, 0, "ORCA total of the clockwise loop is strictly higher"},
      {Kind::PlusStrictlyHigher, RewardFn::Dtw, 0, 0, 0, "DTW total of the clockwise loop is strictly higher"},
  };
  return s;
}

Scenario scenario_dtw_stall() {
  Scenario s;
  s.name = "dtw_stall";
  s.grid = GridSpec{4, 1, {0, 0}, 10};
  s.demo_cells = corridor({0, 1, 2, 3});
  s.plus_cells = corridor({0, 1, 2, 3, 3, 3, 3, 3, 3, 3});
  s.minus_cells = corridor({0, 1, 1, 1, 1, 1, 1, 1, 2, 3});
  s.claims = {
      {Kind::EqualTotals, RewardFn::Dtw, 1e-9, 0, 0, "DTW totals of the stalling and progressing runs are equal"},
      {Kind::PlusStrictlyHigher, RewardFn::Orca, 0, 0, 0, "ORCA total of the progressing run is strictly higher"},
      {Kind::PerStepDominance, RewardFn::Orca, 0, 2, 8,
       "ORCA reward of the progressing run is strictly higher at every step of the stall"},
  };
  return s;
}

Scenario scenario_tot_slow() {
  Scenario s;
  s.name = "tot_slow";
  // Eight unit moves reach the goal in a 9-frame horizon, so any pause
  // fails; the demonstrator's last jump is twice as long as the others.
  s.grid = GridSpec{9, 1, {0, 0}, 9};
  s.demo_cells = corridor({0, 2, 4, 8});
  s.plus_cells = corridor({0, 1, 2, 3, 4, 5, 6, 7, 8});
  s.minus_cells = corridor({0, 0, 1, 2, 3, 4, 5, 6, 7});
  s.claims = {
      {Kind::MinusAtLeast, RewardFn::TemporalOt, 0, 0, 0,
       "TemporalOT total of the slow run is at least that of the steady run"},
      {Kind::PlusStrictlyHigher, RewardFn::Orca, 0, 0, 0, "ORCA total of the steady run is strictly higher"},
      {Kind::GroundTruthSplit, RewardFn::GroundTruth, 0, 0, 0,
       "the steady run reaches the final subgoal and the slow run does not"},
  };
  return s;
}

std::vector<std::string> scenario_names() { return {"ot_ordering", "dtw_stall", "tot_slow"}; }

Scenario scenario_by_name(std::string_view name) {
  if (name == "ot_ordering") return scenario_ot_ordering();
  if (name == "dtw_stall") return scenario_dtw_stall();
  if (name == "tot_slow") return scenario_tot_slow();
  throw InvalidInput("unknown scenario '" + std::string(name) + "'");
}

namespace {

double total(const RewardSeries& r) { return std::accumulate(r.begin(), r.end(), 0.0); }

ClaimResult evaluate_claim(const ScenarioClaim& claim, const RewardSeries& plus, const RewardSeries& minus) {
  ClaimResult out;
  out.statement = claim.statement;
  out.plus = total(plus);
  out.minus = total(minus);
  switch (claim.kind) {
    case Kind::EqualTotals:
      out.passed = std::abs(out.plus - out.minus) <= claim.tol;
      break;
    case Kind::PlusStrictlyHigher:
      out.passed = out.plus > out.minus;
      break;
    case Kind::MinusAtLeast:
      out.passed = out.minus >= out.plus;
      break;
    case Kind::PerStepDominance: {
      out.passed = claim.span_end < plus.size() && claim.span_end < minus.size() && claim.span_begin <= claim.span_end;
      for (std::size_t t = claim.span_begin; out.passed && t <= claim.span_end; ++t) out.passed = plus[t] > minus[t];
      break;
    }
    case Kind::GroundTruthSplit:
      out.passed = out.plus > 0.0 && out.minus == 0.0;
      break;
  }
  return out;
}

}  // namespace

ScenarioReport evaluate_scenario(const Scenario& scenario, const RewardParams& params) {
  ScenarioReport report;
  report.name = scenario.name;
  const Trajectory demo = scenario.demo();
  const Trajectory plus = scenario.xi_plus();
  const Trajectory minus = scenario.xi_minus();
  for (RewardFn fn : {RewardFn::Orca, RewardFn::Ot, RewardFn::TemporalOt, RewardFn::Dtw, RewardFn::Threshold,
                      RewardFn::GroundTruth}) {
    report.plus[fn] = compute_rewards(fn, plus, demo, params).rewards;
    report.minus[fn] = compute_rewards(fn, minus, demo, params).rewards;
  }
  report.passed = true;
  for (const auto& claim : scenario.claims) {
    report.claims.push_back(evaluate_claim(claim, report.plus.at(claim.fn), report.minus.at(claim.fn)));
    report.passed = report.passed && report.claims.back().passed;
  }
  return report;
}

GridTask task_tot_slow() {
  const Scenario s = scenario_tot_slow();
  return GridTask{"tot_slow", s.grid, s.demo_cells, s.plus_cells};
}

GridTask task_two_phase() {
  GridTask t;
  t.name = "two_phase";
  // Fetch at the far end (x = 0), pausing there, then deliver to x = 4.
  // Turning back one cell early still earns most of the coverage.
  t.grid = GridSpec{5, 1, {3, 0}, 12};
  for (int x : {3, 2, 1, 0, 0, 1, 2, 3, 4, 4, 4, 4}) t.demo_cells.push_back({x, 0});
  for (int x : {3, 2, 1, 0, 1, 2, 3, 4, 4, 4, 4, 4}) t.expert_cells.push_back({x, 0});
  return t;
}

std::vector<std::string> task_names() { return {"tot_slow", "two_phase"}; }

GridTask task_by_name(std::string_view name) {
  if (name == "tot_slow") return task_tot_slow();
  if (name == "two_phase") return task_two_phase();
  throw InvalidInput("unknown task '" + std::string(name) + "'");
}

}  // namespace seqmatch
