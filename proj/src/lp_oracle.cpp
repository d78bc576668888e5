#include "cmdp/lp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "cmdp/errors.hpp"

namespace cmdp {

OccupancyLp build_occupancy_lp(const TabularCmdp& cmdp, const SupportMap* mask) {
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions(), N = cmdp.num_constraints();
  if (mask && (mask->horizon() != H || mask->num_states() != S || mask->num_actions() != A)) {
    throw DimensionError("support mask shape does not match CMDP");
  }

  OccupancyLp out;
  std::vector<int> column_of(cmdp.num_state_actions(), -1);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      for (int a = 0; a < A; ++a) {
        if (mask && !mask->contains(h, x, a)) continue;
        const std::size_t i = cmdp.sa_index(h, x, a);
        column_of[i] = static_cast<int>(out.columns.size());
        out.columns.push_back(i);
      }
    }
  }
  const std::size_t nv = out.columns.size();
  auto& lp = out.lp;
  lp.objective.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) lp.objective[j] = cmdp.tables().rewards[out.columns[j]];

  for (int n = 0; n < N; ++n) {
    Constraint row{std::vector<double>(nv, 0.0), Relation::kGreaterEqual, cmdp.threshold(n)};
    for (std::size_t j = 0; j < nv; ++j) {
      row.coefficients[j] = cmdp.tables().utilities[n * cmdp.num_state_actions() + out.columns[j]];
    }
    lp.rows.push_back(std::move(row));
  }

  for (int h = 0; h + 1 < H; ++h) {
    for (int x = 0; x < S; ++x) {
      Constraint row{std::vector<double>(nv, 0.0), Relation::kEqual, 0.0};
      for (int a = 0; a < A; ++a) {
        const int c = column_of[cmdp.sa_index(h + 1, x, a)];
        if (c >= 0) row.coefficients[c] += 1.0;
      }
      for (int y = 0; y < S; ++y) {
        for (int a = 0; a < A; ++a) {
          const int c = column_of[cmdp.sa_index(h, y, a)];
          if (c >= 0) row.coefficients[c] -= cmdp.transition(h, y, a, x);
        }
      }
      lp.rows.push_back(std::move(row));
    }
  }

  for (int x = 0; x < S; ++x) {
    Constraint row{std::vector<double>(nv, 0.0), Relation::kEqual, x == cmdp.initial_state() ? 1.0 : 0.0};
    for (int a = 0; a < A; ++a) {
      const int c = column_of[cmdp.sa_index(0, x, a)];
      if (c >= 0) row.coefficients[c] = 1.0;
    }
    lp.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

ExactSolution solve_masked(const TabularCmdp& cmdp, const SupportMap* mask, const OracleOptions& options) {
  OccupancyLp olp = build_occupancy_lp(cmdp, mask);
  ExactSolution out;
  out.lp = simplex_solve(olp.lp, options.simplex);
  switch (out.lp.status) {
    case LpStatus::kOptimal: break;
    case LpStatus::kInfeasible: throw InfeasibleError("CMDP constraints cannot be satisfied");
    default: throw NumericalError("simplex failed: " + to_string(out.lp.status));
  }

  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions();
  std::vector<double> mass(cmdp.num_state_actions(), 0.0);
  for (std::size_t j = 0; j < olp.columns.size(); ++j) {
    mass[olp.columns[j]] = out.lp.primal[j];
    if (out.lp.primal[j] > options.support_tol) ++out.nonzero_count;
  }
  out.occupancy = OccupancyMeasure(H, S, A, std::move(mass));
  const MarkovPolicy fallback =
      mask ? MarkovPolicy::uniform_over(*mask) : MarkovPolicy::uniform(H, S, A);
  out.policy = policy_of_occupancy(out.occupancy, fallback);
  out.stochastic_count = stochastic_decision_count(out.policy, reachable_decisions(out.occupancy));
  const PolicyValue pv = linear_value(cmdp, out.occupancy);
  out.value = pv.value;
  out.utilities = pv.utilities;
  return out;
}

}  // namespace

ExactSolution solve_cmdp_exact(const TabularCmdp& cmdp, const OracleOptions& options) {
  return solve_masked(cmdp, nullptr, options);
}

ExactSolution solve_cmdp_restricted(const TabularCmdp& cmdp, const SupportMap& support,
                                    const OracleOptions& options) {
  return solve_masked(cmdp, &support, options);
}

std::size_t greedy_policy_count(const SupportMap& support) {
  std::size_t m = 1;
  for (int h = 0; h < support.horizon(); ++h) {
    for (int x = 0; x < support.num_states(); ++x) {
      const std::size_t k = support.actions(h, x).size();
      if (m > std::numeric_limits<std::size_t>::max() / k) return std::numeric_limits<std::size_t>::max();
      m *= k;
    }
  }
  return m;
}

std::vector<GreedyPolicy> enumerate_greedy_policies(const SupportMap& support, std::size_t cap) {
  const std::size_t m = greedy_policy_count(support);
  if (m > cap) {
    throw BlowupError("greedy policy count " +
                      (m == std::numeric_limits<std::size_t>::max() ? std::string("overflow")
                                                                    : std::to_string(m)) +
                      " exceeds cap " + std::to_string(cap));
  }
  const int H = support.horizon(), S = support.num_states(), A = support.num_actions();
  const std::size_t D = support.num_decisions();
  std::vector<std::size_t> digit(D, 0);
  std::vector<GreedyPolicy> out;
  out.reserve(m);
  std::vector<int> actions(D);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t d = 0; d < D; ++d) {
      const int h = static_cast<int>(d / S), x = static_cast<int>(d % S);
      actions[d] = support.actions(h, x)[digit[d]];
    }
    out.emplace_back(H, S, A, actions);
    // Odometer: the last decision turns fastest.
    for (std::size_t d = D; d-- > 0;) {
      const int h = static_cast<int>(d / S), x = static_cast<int>(d % S);
      if (++digit[d] < support.actions(h, x).size()) break;
      digit[d] = 0;
    }
  }
  return out;
}

GreedyMix decompose(const MarkovPolicy& policy, const SupportMap& support, std::size_t cap) {
  const int H = policy.horizon(), S = policy.num_states(), A = policy.num_actions();
  if (support.horizon() != H || support.num_states() != S || support.num_actions() != A) {
    throw DimensionError("support shape does not match policy");
  }
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      for (int a = 0; a < A; ++a) {
        if (policy.prob(h, x, a) > kIdentityTol && !support.contains(h, x, a)) {
          throw SupportError("policy puts mass on action " + std::to_string(a) + " outside support at (h=" +
                             std::to_string(h) + ", x=" + std::to_string(x) + ")");
        }
      }
    }
  }
  GreedyMix mix;
  mix.policies = enumerate_greedy_policies(support, cap);
  mix.weights.reserve(mix.policies.size());
  for (const auto& g : mix.policies) {
    double w = 1.0;
    for (int h = 0; h < H && w != 0.0; ++h)
      for (int x = 0; x < S; ++x) w *= policy.prob(h, x, g.action(h, x));
    mix.weights.push_back(w);
  }
  return mix;
}

OccupancyMeasure mixture_occupancy(const TabularCmdp& cmdp, const GreedyMix& mix) {
  if (mix.policies.size() != mix.weights.size()) throw DimensionError("mixture weights mismatch");
  std::vector<double> mass(cmdp.num_state_actions(), 0.0);
  for (std::size_t m = 0; m < mix.policies.size(); ++m) {
    if (mix.weights[m] == 0.0) continue;
    const OccupancyMeasure q = occupancy_of_policy(cmdp, mix.policies[m]);
    for (std::size_t i = 0; i < mass.size(); ++i) mass[i] += mix.weights[m] * q.values()[i];
  }
  return OccupancyMeasure(cmdp.horizon(), cmdp.num_states(), cmdp.num_actions(), std::move(mass));
}

PolicyValue mixture_value(const TabularCmdp& cmdp, const GreedyMix& mix) {
  if (mix.policies.size() != mix.weights.size()) throw DimensionError("mixture weights mismatch");
  PolicyValue out;
  out.utilities.assign(cmdp.num_constraints(), 0.0);
  for (std::size_t m = 0; m < mix.policies.size(); ++m) {
    const PolicyValue pv = eval_greedy(cmdp, mix.policies[m]);
    out.value += mix.weights[m] * pv.value;
    for (int n = 0; n < cmdp.num_constraints(); ++n) out.utilities[n] += mix.weights[m] * pv.utilities[n];
  }
  return out;
}

std::optional<std::vector<double>> solve_decomposition_opt(std::span<const double> vbar,
                                                           const std::vector<std::vector<double>>& wbar,
                                                           std::span<const double> rho, double radius,
                                                           double eps_prime) {
  const std::size_t M = vbar.size(), N = rho.size();
  if (M == 0) throw ValidationError("decomposition needs at least one policy");
  if (wbar.size() != M) throw DimensionError("wbar must have one row per policy");
  for (const auto& row : wbar) {
    if (row.size() != N) throw DimensionError("wbar row length must equal the constraint count");
  }
  if (!(radius >= 0.0)) throw ValidationError("radius must be nonnegative");
  if (eps_prime < 0.0 || eps_prime * static_cast<double>(M) > 1.0 + kIdentityTol) {
    throw ValidationError("eps_prime * M must lie in [0, 1]");
  }

  // a_m = eps' + s_m with s_m >= 0.
  LinearProgram lp;
  lp.objective.assign(vbar.begin(), vbar.end());
  const double free_mass = std::max(0.0, 1.0 - eps_prime * static_cast<double>(M));
  lp.rows.push_back({std::vector<double>(M, 1.0), Relation::kEqual, free_mass});
  for (std::size_t n = 0; n < N; ++n) {
    std::vector<double> coef(M);
    double base = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      coef[m] = wbar[m][n];
      base += eps_prime * wbar[m][n];
    }
    lp.rows.push_back({coef, Relation::kLessEqual, rho[n] + radius - base});
    lp.rows.push_back({coef, Relation::kGreaterEqual, rho[n] - radius - base});
  }
  const LpSolution sol = simplex_solve(lp);
  if (sol.status == LpStatus::kInfeasible) return std::nullopt;
  if (sol.status != LpStatus::kOptimal) {
    throw NumericalError("decomposition LP failed: " + to_string(sol.status));
  }
  std::vector<double> a(M);
  double total = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    a[m] = eps_prime + sol.primal[m];
    total += a[m];
  }
  for (double& v : a) v /= total;
  return a;
}

}  // namespace cmdp
