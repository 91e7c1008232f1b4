#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "seqmatch/dtw.hpp"
#include "seqmatch/error.hpp"

using namespace seqmatch;

TEST_CASE("dtw on the three-by-two example") {
  const Matrix c = Matrix::from_rows({{0, 2}, {0, 2}, {2, 0}});
  const DtwAlignment a = dtw_align(c);
  CHECK(a.path == WarpPath{{0, 0}, {1, 0}, {2, 1}});
  CHECK(a.total_cost == 0.0);
  CHECK(dtw_rewards_from_cost(c) == RewardSeries{0.0, 0.0, 0.0});
}

TEST_CASE("dtw trivial cases") {
  const Trajectory traj({{0.0}, {1.0}, {3.0}});
  for (double r : dtw_rewards(traj, traj, Metric::Manhattan)) CHECK(r == 0.0);
  const DtwAlignment one = dtw_align(Matrix::from_rows({{2.5}}));
  CHECK(one.path == WarpPath{{0, 0}});
  CHECK(one.total_cost == 2.5);
  CHECK_THROWS_AS(dtw_align(Matrix()), InvalidInput);
}

TEST_CASE("diagonal predecessor wins ties") {
  const DtwAlignment a = dtw_align(Matrix(3, 3, 0.0));
  CHECK(a.path == WarpPath{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("warp path validity checker") {
  CHECK(is_valid_warp_path({{0, 0}, {1, 1}}, 2, 2));
  CHECK_FALSE(is_valid_warp_path({}, 1, 1));
  CHECK_FALSE(is_valid_warp_path({{0, 0}, {1, 1}}, 2, 3));
  CHECK_FALSE(is_valid_warp_path({{0, 0}, {1, 2}}, 2, 3));
  CHECK_FALSE(is_valid_warp_path({{0, 0}, {0, 0}, {1, 1}}, 2, 2));
  CHECK_FALSE(is_valid_warp_path({{0, 1}, {1, 1}}, 2, 2));
}

TEST_CASE("random warp paths are valid and their cost adds up") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> dim(1, 20);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    const Matrix c = Matrix::from_rows(oracle::random_grid(rng, rows, cols, 0.0, 5.0));
    const DtwAlignment a = dtw_align(c);
    CHECK(is_valid_warp_path(a.path, rows, cols));
    double s = 0.0;
    for (const WarpStep& w : a.path) s += c(w.t, w.j);
    CHECK(s == doctest::Approx(a.total_cost).epsilon(1e-12));
    const RewardSeries r = dtw_rewards_from_cost(c);
    double rs = 0.0;
    for (double x : r) rs += x;
    CHECK(rs == doctest::Approx(-a.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("dtw cost equals the exhaustive minimum") {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  std::uniform_int_distribution<int> cell(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    oracle::Grid g(rows, std::vector<double>(cols));
    for (auto& row : g) {
      for (double& v : row) v = cell(rng);
    }
    CHECK(dtw_align(Matrix::from_rows(g)).total_cost == oracle::dtw_by_enumeration(g));
  }
  CHECK(oracle::count_warp_paths(3, 3) == 13);
}
