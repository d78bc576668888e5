#pragma once

#include <string>
#include <vector>

namespace cmdp {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Constraint {
  std::vector<double> coefficients;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

/// maximize objective . x  subject to rows, x >= 0.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Constraint> rows;

  int num_variables() const { return static_cast<int>(objective.size()); }
  /// Throws DimensionError / ValidationError on ragged or non-finite data.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> primal;
  double objective = 0.0;
  /// basic[j] is true when structural variable j is in the final basis.
  std::vector<bool> basic;
  int iterations = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double feas_tol = 1e-8;
  int max_iterations = 200000;
};

/// Dense two-phase primal simplex with Bland's rule. Ratio-test ties go to
/// the lowest basic variable index. An optimal result is always a basic
/// feasible solution that has been re-checked against the original rows.
LpSolution simplex_solve(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace cmdp
