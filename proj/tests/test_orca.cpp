#include <doctest.h>

#include <cmath>
#include <random>

#include "constructions.hpp"
#include "oracles.hpp"
#include "seqmatch/error.hpp"
#include "seqmatch/orca.hpp"

using namespace seqmatch;

namespace {

Trajectory line(std::initializer_list<double> xs) {
  std::vector<FrameEmbedding> frames;
  for (double x : xs) frames.push_back({x});
  return Trajectory(frames);
}

Matrix random_probability(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  return Matrix::from_rows(oracle::random_grid(rng, rows, cols, 1e-3, 1.0));
}

}  // namespace

TEST_CASE("coverage of a single perfect frame") {
  CHECK(coverage_matrix(Matrix::from_rows({{1}})) == Matrix::from_rows({{1}}));
  CHECK(coverage_oracle(Matrix::from_rows({{1}})) == Matrix::from_rows({{1}}));
}

TEST_CASE("coverage on the three-by-two example") {
  const double e1 = std::exp(-1.0), e2 = std::exp(-2.0);
  const Matrix p = Matrix::from_rows({{1, e2}, {e1, e1}, {e2, 1}});
  const Matrix c = coverage_matrix(p);
  CHECK(c(0, 0) == 1.0);
  CHECK(c(0, 1) == doctest::Approx(e2));
  CHECK(c(1, 0) == 1.0);
  CHECK(c(1, 1) == doctest::Approx(e1));
  CHECK(c(2, 0) == 1.0);
  CHECK(c(2, 1) == 1.0);
}

TEST_CASE("coverage rejects empty input") {
  CHECK_THROWS_AS(coverage_matrix(Matrix()), InvalidInput);
  CHECK_THROWS_AS(coverage_oracle(Matrix()), InvalidInput);
}

TEST_CASE("single-column coverage is the running max") {
  const Matrix p = Matrix::from_rows({{0.2}, {0.7}, {0.4}, {0.9}});
  const Matrix c = coverage_oracle(p);
  CHECK(c(0, 0) == 0.2);
  CHECK(c(1, 0) == 0.7);
  CHECK(c(2, 0) == 0.7);
  CHECK(c(3, 0) == 0.9);
  CHECK(coverage_matrix(p) == c);
}

TEST_CASE("recurrence matches the closed form and brute force") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix p = random_probability(rng, dim(rng), dim(rng));
    const Matrix c = coverage_matrix(p);
    const Matrix o = coverage_oracle(p);
    for (std::size_t i = 0; i < c.values().size(); ++i) {
      CHECK(std::abs(c.values()[i] - o.values()[i]) <= 1e-12);
    }
  }
  std::uniform_int_distribution<std::size_t> small(1, 5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = oracle::random_grid(rng, small(rng), small(rng), 1e-3, 1.0);
    const Matrix c = coverage_matrix(Matrix::from_rows(g));
    for (std::size_t t = 0; t < c.rows(); ++t) {
      for (std::size_t j = 0; j < c.cols(); ++j) {
        CHECK(c(t, j) == doctest::Approx(oracle::coverage_by_enumeration(g, t, j)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("coverage is monotone in both axes and stays in the unit interval") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dim(1, 15);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix c = coverage_matrix(random_probability(rng, dim(rng), dim(rng)));
    for (std::size_t t = 0; t < c.rows(); ++t) {
      for (std::size_t j = 0; j < c.cols(); ++j) {
        CHECK(c(t, j) >= 0.0);
        CHECK(c(t, j) <= 1.0);
        if (t > 0) CHECK(c(t, j) >= c(t - 1, j));
        if (j > 0) CHECK(c(t, j) <= c(t, j - 1));
      }
    }
  }
}

TEST_CASE("orca rewards on the one-dimensional example") {
  const RewardSeries r = orca_rewards(line({0, 1, 2}), line({0, 2}), Metric::Manhattan, 1.0);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(0.135335283237));
  CHECK(r[1] == doctest::Approx(0.367879441171));
  CHECK(r[2] == doctest::Approx(1.0));
}

TEST_CASE("orca rewards edge cases") {
  const Trajectory d = line({3, 1, 4, 1, 5});
  CHECK(orca_rewards(d, d, Metric::Manhattan).back() == 1.0);
  const RewardSeries one = orca_rewards(line({2}), line({2}), Metric::Euclidean);
  CHECK(one == RewardSeries{1.0});
  const RewardSeries single = orca_rewards(line({0, 1, 3}), line({1}), Metric::Manhattan);
  CHECK(single[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(single[1] == 1.0);
  CHECK(single[2] == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS_AS(orca_rewards(Trajectory(), d, Metric::Manhattan), InvalidInput);
  CHECK_THROWS_AS(orca_rewards(d, Trajectory(), Metric::Manhattan), InvalidInput);
}

TEST_CASE("orca rewards lie in the unit interval and are causal") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len(1, 10);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto make = [&](std::size_t n) {
      std::vector<FrameEmbedding> f(n, FrameEmbedding(2));
      for (auto& fr : f) {
        for (double& x : fr) x = u(rng);
      }
      return Trajectory(f);
    };
    const Trajectory learner = make(len(rng));
    const Trajectory demo = make(len(rng));
    const RewardSeries full = orca_rewards(learner, demo, Metric::Euclidean);
    for (double r : full) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
    for (std::size_t cut = 1; cut <= learner.size(); ++cut) {
      const RewardSeries part = orca_rewards(learner.prefix(cut), demo, Metric::Euclidean);
      REQUIRE(part.size() == cut);
      for (std::size_t t = 0; t < cut; ++t) CHECK(part[t] == full[t]);
    }
  }
}

TEST_CASE("earlier occupation of the previous subgoal raises the reward") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const construct::Pair pair = construct::ordering_pair(rng);
    const RewardSeries plus = orca_rewards(pair.plus, pair.demo, Metric::Manhattan, pair.lambda);
    const RewardSeries minus = orca_rewards(pair.minus, pair.demo, Metric::Manhattan, pair.lambda);
    CHECK(plus[pair.t] > minus[pair.t]);
  }
}

TEST_CASE("moving towards the next subgoal beats stalling") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const construct::Pair pair = construct::progress_pair(rng);
    const RewardSeries plus = orca_rewards(pair.plus, pair.demo, Metric::Manhattan, pair.lambda);
    const RewardSeries minus = orca_rewards(pair.minus, pair.demo, Metric::Manhattan, pair.lambda);
    CHECK(plus[pair.t] > minus[pair.t]);
  }
}

TEST_CASE("covering a subgoal strictly raises its coverage") {
  // Identical probability rows except that row t reaches P = 1 on column j
  // in one copy, where no earlier row had done so.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    Matrix p = Matrix::from_rows(oracle::random_grid(rng, rows, cols, 0.05, 0.9));
    const std::size_t t = std::uniform_int_distribution<std::size_t>(1, rows - 1)(rng);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, cols - 1)(rng);
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t k = 0; k < j; ++k) p(i, k) = 1.0;
    }
    Matrix covered = p;
    covered(t, j) = 1.0;
    CHECK(coverage_matrix(covered)(t, j) > coverage_matrix(p)(t, j));
  }
}
