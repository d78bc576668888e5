#include <cmath>

#include "doctest.h"
#include "cmdp/errors.hpp"
#include "cmdp/rng.hpp"
#include "cmdp/simplex.hpp"
#include "oracles.hpp"

using namespace cmdp;

namespace {

Constraint row(std::vector<double> c, Relation rel, double rhs) { return {std::move(c), rel, rhs}; }

}  // namespace

TEST_CASE("simplex solves a textbook maximization") {
  LinearProgram lp;
  lp.objective = {3, 5};
  lp.rows = {row({1, 0}, Relation::kLessEqual, 4), row({0, 2}, Relation::kLessEqual, 12),
             row({3, 2}, Relation::kLessEqual, 18)};
  const LpSolution s = simplex_solve(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(36));
  CHECK(s.primal[0] == doctest::Approx(2));
  CHECK(s.primal[1] == doctest::Approx(6));
}

TEST_CASE("simplex needs phase one for >= and = rows") {
  LinearProgram lp;
  lp.objective = {-1, -1};
  lp.rows = {row({1, 1}, Relation::kGreaterEqual, 2), row({1, -1}, Relation::kEqual, 1)};
  const LpSolution s = simplex_solve(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(-2));
  CHECK(s.primal[0] == doctest::Approx(1.5));
  CHECK(s.primal[1] == doctest::Approx(0.5));
}

TEST_CASE("simplex reports infeasible and unbounded problems") {
  LinearProgram infeasible;
  infeasible.objective = {1};
  infeasible.rows = {row({1}, Relation::kLessEqual, 1), row({1}, Relation::kGreaterEqual, 2)};
  CHECK(simplex_solve(infeasible).status == LpStatus::kInfeasible);

  LinearProgram unbounded;
  unbounded.objective = {1, 0};
  unbounded.rows = {row({1, -1}, Relation::kLessEqual, 1)};
  CHECK(simplex_solve(unbounded).status == LpStatus::kUnbounded);
}

TEST_CASE("negative right-hand sides are handled") {
  LinearProgram lp;
  lp.objective = {-1};
  lp.rows = {row({-1}, Relation::kLessEqual, -3)};
  const LpSolution s = simplex_solve(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.primal[0] == doctest::Approx(3));
}

TEST_CASE("degenerate problem terminates under Bland's rule") {
  // Beale's example cycles with the largest-coefficient rule.
  LinearProgram lp;
  lp.objective = {0.75, -150, 0.02, -6};
  lp.rows = {row({0.25, -60, -0.04, 9}, Relation::kLessEqual, 0), row({0.5, -90, -0.02, 3}, Relation::kLessEqual, 0),
             row({0, 0, 1, 0}, Relation::kLessEqual, 1)};
  const LpSolution s = simplex_solve(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(0.05));
}

TEST_CASE("optimal answers are basic") {
  LinearProgram lp;
  lp.objective = {1, 1, 1};
  lp.rows = {row({1, 1, 1}, Relation::kLessEqual, 1)};
  const LpSolution s = simplex_solve(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  int nonzero = 0, basic = 0;
  for (int j = 0; j < 3; ++j) {
    nonzero += s.primal[j] > 1e-12;
    basic += s.basic[j];
  }
  CHECK(nonzero <= 1);
  CHECK(basic <= 1);
}

TEST_CASE("simplex agrees with vertex enumeration on small random LPs") {
  RngStream rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + rng.uniform_int(3);
    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.objective.push_back(std::round(rng.uniform() * 8 - 4));
    lp.rows.push_back(row(std::vector<double>(n, 1.0), Relation::kLessEqual, 10));
    const int extra = 1 + rng.uniform_int(2);
    for (int i = 0; i < extra; ++i) {
      std::vector<double> c;
      for (int j = 0; j < n; ++j) c.push_back(std::round(rng.uniform() * 6 - 2));
      const Relation rel = rng.uniform() < 0.5 ? Relation::kLessEqual : Relation::kGreaterEqual;
      lp.rows.push_back(row(c, rel, std::round(rng.uniform() * 6)));
    }
    const LpSolution s = simplex_solve(lp);
    const oracle::Enumerated e = oracle::enumerate_bfs(lp);
    CAPTURE(trial);
    REQUIRE((s.status == LpStatus::kOptimal) == e.feasible);
    if (e.feasible) CHECK(std::abs(s.objective - e.objective) <= 1e-8);
  }
}

TEST_CASE("ragged programs are rejected") {
  LinearProgram lp;
  lp.objective = {1, 2};
  lp.rows = {row({1}, Relation::kLessEqual, 1)};
  CHECK_THROWS_AS(lp.validate(), DimensionError);
  lp.rows = {row({1, NAN}, Relation::kLessEqual, 1)};
  CHECK_THROWS_AS(lp.validate(), ValidationError);
}
