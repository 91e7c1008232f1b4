#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "seqmatch/core.hpp"
#include "seqmatch/rewards.hpp"

namespace seqmatch {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

// Deterministic 2D navigation grid; y grows upward. horizon counts
// observations per episode, including the start cell.
struct GridSpec {
  int width = 1;
  int height = 1;
  Cell start;
  int horizon = 1;

  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  void validate() const;
};

enum class GridAction { Up, Down, Left, Right, Stay };

inline constexpr std::array<GridAction, 5> kGridActions{GridAction::Up, GridAction::Down, GridAction::Left,
                                                        GridAction::Right, GridAction::Stay};
inline constexpr std::size_t kNumGridActions = kGridActions.size();

std::string_view action_name(GridAction a);

// Single-cell move; moves into a wall leave the agent in place.
Cell step(Cell state, GridAction action, const GridSpec& grid);

FrameEmbedding embed(Cell c);
Trajectory to_trajectory(const std::vector<Cell>& cells);

// Starts at grid.start, stays in bounds, moves at most one unit per step.
bool is_feasible(const std::vector<Cell>& cells, const GridSpec& grid);

// Sum of ground_truth_rewards: steps spent on the final subgoal after all
// subgoals were visited in order.
int ground_truth_return(const Trajectory& traj, const Trajectory& demo);

struct ScenarioClaim {
  enum class Kind {
    EqualTotals,         // |sum r(xi+) - sum r(xi-)| <= tol
    PlusStrictlyHigher,  // sum r(xi+) > sum r(xi-)
    MinusAtLeast,        // sum r(xi-) >= sum r(xi+)
    PerStepDominance,    // r_t(xi+) > r_t(xi-) for t in [span_begin, span_end]
    GroundTruthSplit,    // xi+ succeeds, xi- does not
  };
  Kind kind;
  RewardFn fn = RewardFn::GroundTruth;
  double tol = 0.0;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
  std::string statement;
};

struct Scenario {
  std::string name;
  GridSpec grid;
  std::vector<Cell> demo_cells;
  std::vector<Cell> plus_cells;
  std::vector<Cell> minus_cells;
  std::vector<ScenarioClaim> claims;

  Trajectory demo() const { return to_trajectory(demo_cells); }
  Trajectory xi_plus() const { return to_trajectory(plus_cells); }
  Trajectory xi_minus() const { return to_trajectory(minus_cells); }
};

// Ring: a clockwise perimeter loop versus its exact reversal.
Scenario scenario_ot_ordering();
// Adjacent subgoals in a corridor; xi- parks on the second subgoal.
Scenario scenario_dtw_stall();
// Subgoals two or more cells apart with no slack in the horizon; xi- lingers
// on the first subgoal and runs out of time.
Scenario scenario_tot_slow();

std::vector<std::string> scenario_names();
Scenario scenario_by_name(std::string_view name);

struct ClaimResult {
  std::string statement;
  bool passed = false;
  double plus = 0.0;
  double minus = 0.0;
};

struct ScenarioReport {
  std::string name;
  std::map<RewardFn, RewardSeries> plus;
  std::map<RewardFn, RewardSeries> minus;
  std::vector<ClaimResult> claims;
  bool passed = false;
};

// All five matching rewards plus ground truth on xi+ and xi-, followed by
// each claim. Manhattan distance, lambda = 1 unless params say otherwise.
ScenarioReport evaluate_scenario(const Scenario& scenario, const RewardParams& params = {});

// A training task: grid, demonstration, and the scripted expert rollout used
// to normalise returns.
struct GridTask {
  std::string name;
  GridSpec grid;
  std::vector<Cell> demo_cells;
  std::vector<Cell> expert_cells;

  Trajectory demo() const { return to_trajectory(demo_cells); }
};

GridTask task_tot_slow();
// Fetch-then-deliver task: the far end of the corridor must be reached
// before the goal, and turning back early still earns partial coverage.
GridTask task_two_phase();

std::vector<std::string> task_names();
GridTask task_by_name(std::string_view name);

}  // namespace seqmatch
