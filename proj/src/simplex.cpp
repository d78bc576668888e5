#include "cmdp/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "cmdp/errors.hpp"

namespace cmdp {

void LinearProgram::validate() const {
  const std::size_t n = objective.size();
  for (double c : objective) {
    if (!std::isfinite(c)) throw ValidationError("non-finite objective coefficient");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].coefficients.size() != n) {
      throw DimensionError("constraint row " + std::to_string(i) + " has wrong length");
    }
    if (!std::isfinite(rows[i].rhs)) throw ValidationError("non-finite right-hand side");
    for (double a : rows[i].coefficients) {
      if (!std::isfinite(a)) throw ValidationError("non-finite constraint coefficient");
    }
  }
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    n_ = lp.num_variables();
    m_ = static_cast<int>(lp.rows.size());
    int slacks = 0, arts = 0;
    for (const auto& row : lp.rows) {
      const Relation rel = effective(row);
      if (rel != Relation::kEqual) ++slacks;
      if (rel != Relation::kLessEqual) ++arts;
    }
    first_art_ = n_ + slacks;
    cols_ = first_art_ + arts;
    width_ = cols_ + 1;
    t_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
    basis_.assign(m_, -1);
    active_.assign(m_, true);

    int s = n_, a = first_art_;
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp.rows[i];
      const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < n_; ++j) at(i, j) = sign * row.coefficients[j];
      rhs(i) = sign * row.rhs;
      switch (effective(row)) {
        case Relation::kLessEqual:
          at(i, s) = 1.0;
          basis_[i] = s++;
          break;
        case Relation::kGreaterEqual:
          at(i, s++) = -1.0;
          at(i, a) = 1.0;
          basis_[i] = a++;
          break;
        case Relation::kEqual:
          at(i, a) = 1.0;
          basis_[i] = a++;
          break;
      }
    }
  }

  int num_artificials() const { return cols_ - first_art_; }

  // Returns kOptimal, kUnbounded or kNumericalFailure (iteration cap).
  LpStatus optimize(const std::vector<double>& cost, bool allow_artificial) {
    std::vector<bool> in_basis(cols_, false);
    for (;;) {
      std::fill(in_basis.begin(), in_basis.end(), false);
      for (int i = 0; i < m_; ++i)
        if (active_[i]) in_basis[basis_[i]] = true;

      const int limit = allow_artificial ? cols_ : first_art_;
      int enter = -1;
      for (int j = 0; j < limit && enter < 0; ++j) {
        if (in_basis[j]) continue;
        double d = cost[j];
        for (int i = 0; i < m_; ++i) {
          if (active_[i]) d -= cost[basis_[i]] * at(i, j);
        }
        if (d > opt_.pivot_tol) enter = j;
      }
      if (enter < 0) return LpStatus::kOptimal;

      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (!active_[i] || at(i, enter) <= opt_.pivot_tol) continue;
        const double ratio = std::max(rhs(i), 0.0) / at(i, enter);
        if (leave < 0 || ratio < best - 1e-12) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + 1e-12 && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      if (++iterations_ > opt_.max_iterations) return LpStatus::kNumericalFailure;
      pivot(leave, enter);
    }
  }

  double artificial_mass() const {
    double sum = 0.0;
    for (int i = 0; i < m_; ++i)
      if (active_[i] && basis_[i] >= first_art_) sum += std::abs(rhs(i));
    return sum;
  }

  // Pivots zero-level artificials out of the basis; rows with no eligible
  // column are linearly dependent and are dropped.
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!active_[i] || basis_[i] < first_art_) continue;
      rhs(i) = 0.0;
      int col = -1;
      for (int j = 0; j < first_art_; ++j) {
        if (std::abs(at(i, j)) > opt_.pivot_tol) {
          col = j;
          break;
        }
      }
      if (col < 0) {
        active_[i] = false;
      } else {
        pivot(i, col);
      }
    }
  }

  std::vector<double> structural_values(std::vector<bool>& basic) const {
    std::vector<double> x(n_, 0.0);
    basic.assign(n_, false);
    for (int i = 0; i < m_; ++i) {
      if (active_[i] && basis_[i] < n_) {
        x[basis_[i]] = rhs(i);
        basic[basis_[i]] = true;
      }
    }
    return x;
  }

  int iterations() const { return iterations_; }
  int first_artificial() const { return first_art_; }
  int columns() const { return cols_; }

 private:
  static Relation effective(const Constraint& row) {
    if (row.rhs >= 0.0) return row.relation;
    if (row.relation == Relation::kLessEqual) return Relation::kGreaterEqual;
    if (row.relation == Relation::kGreaterEqual) return Relation::kLessEqual;
    return Relation::kEqual;
  }

  double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * width_ + j]; }
  double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * width_ + j]; }
  double& rhs(int i) { return at(i, cols_); }
  double rhs(int i) const { return at(i, cols_); }

  void pivot(int r, int e) {
    const double p = at(r, e);
    double* prow = &t_[static_cast<std::size_t>(r) * width_];
    for (int j = 0; j < width_; ++j) prow[j] /= p;
    prow[e] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r || !active_[i]) continue;
      double* row = &t_[static_cast<std::size_t>(i) * width_];
      const double f = row[e];
      if (f == 0.0) continue;
      for (int j = 0; j < width_; ++j) {
        if (prow[j] == 0.0) continue;
        row[j] -= f * prow[j];
        if (std::abs(row[j]) < 1e-14) row[j] = 0.0;
      }
      row[e] = 0.0;
    }
    basis_[r] = e;
  }

  SimplexOptions opt_;
  int n_ = 0, m_ = 0, cols_ = 0, width_ = 0, first_art_ = 0;
  int iterations_ = 0;
  std::vector<double> t_;
  std::vector<int> basis_;
  std::vector<bool> active_;
};

bool satisfies(const LinearProgram& lp, const std::vector<double>& x, double tol) {
  for (double v : x)
    if (v < -tol) return false;
  for (const auto& row : lp.rows) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coefficients[j] * x[j];
    const double slack = tol * (1.0 + std::abs(row.rhs));
    switch (row.relation) {
      case Relation::kLessEqual:
        if (lhs > row.rhs + slack) return false;
        break;
      case Relation::kGreaterEqual:
        if (lhs < row.rhs - slack) return false;
        break;
      case Relation::kEqual:
        if (std::abs(lhs - row.rhs) > slack) return false;
        break;
    }
  }
  return true;
}

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  LpSolution out;
  Tableau tab(lp, options);

  if (tab.num_artificials() > 0) {
    std::vector<double> phase1(tab.columns(), 0.0);
    for (int j = tab.first_artificial(); j < tab.columns(); ++j) phase1[j] = -1.0;
    const LpStatus s = tab.optimize(phase1, true);
    out.iterations = tab.iterations();
    if (s == LpStatus::kNumericalFailure) return out;
    // Phase 1 is bounded by construction; kUnbounded here means breakdown.
    if (s != LpStatus::kOptimal) return out;
    if (tab.artificial_mass() > options.feas_tol) {
      out.status = LpStatus::kInfeasible;
      return out;
    }
    tab.expel_artificials();
  }

  std::vector<double> phase2(tab.columns(), 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), phase2.begin());
  const LpStatus s = tab.optimize(phase2, false);
  out.iterations = tab.iterations();
  if (s != LpStatus::kOptimal) {
    out.status = s;
    return out;
  }

  out.primal = tab.structural_values(out.basic);
  for (double& v : out.primal) {
    if (std::abs(v) < 1e-11) v = 0.0;
  }
  if (!satisfies(lp, out.primal, options.feas_tol)) {
    out.status = LpStatus::kNumericalFailure;
    return out;
  }
  out.objective = 0.0;
  for (std::size_t j = 0; j < out.primal.size(); ++j) out.objective += lp.objective[j] * out.primal[j];
  out.status = LpStatus::kOptimal;
  return out;
}

}  // namespace cmdp
