#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cmdp/core.hpp"
#include "cmdp/simplex.hpp"

namespace cmdp {

inline constexpr std::size_t kDefaultGreedyCap = 4096;

/// Occupancy LP with the structural-column map. columns[j] is the
/// TabularCmdp::sa_index of LP variable j.
struct OccupancyLp {
  LinearProgram lp;
  std::vector<std::size_t> columns;
};

/// Rows, in order: N utility rows (>= rho), (H-1)*S flow rows, S initial rows.
/// Without a mask there is one variable per (h,x,a).
OccupancyLp build_occupancy_lp(const TabularCmdp& cmdp, const SupportMap* mask = nullptr);

struct OracleOptions {
  double support_tol = 1e-8;
  SimplexOptions simplex;
};

struct ExactSolution {
  OccupancyMeasure occupancy;
  MarkovPolicy policy;
  double value = 0.0;
  std::vector<double> utilities;
  int nonzero_count = 0;
  int stochastic_count = 0;
  LpSolution lp;
};

/// Basic optimal solution of the occupancy LP. Throws InfeasibleError when the
/// constraints cannot be met and NumericalError on solver breakdown.
ExactSolution solve_cmdp_exact(const TabularCmdp& cmdp, const OracleOptions& options = {});

/// Same, with q_h(x,a) forced to zero for a outside support(h,x).
ExactSolution solve_cmdp_restricted(const TabularCmdp& cmdp, const SupportMap& support,
                                    const OracleOptions& options = {});

struct GreedyMix {
  std::vector<GreedyPolicy> policies;
  std::vector<double> weights;
};

/// prod |D_{h,x}|, saturating at SIZE_MAX.
std::size_t greedy_policy_count(const SupportMap& support);

/// All greedy policies drawn from the support. The first (h,x) varies slowest.
/// Throws BlowupError when the count exceeds cap.
std::vector<GreedyPolicy> enumerate_greedy_policies(const SupportMap& support,
                                                    std::size_t cap = kDefaultGreedyCap);

/// a_m = prod_{h,x} pi_h(a_m(h,x)|x) over the enumeration of `support`.
/// Throws SupportError if the policy puts mass outside the support.
GreedyMix decompose(const MarkovPolicy& policy, const SupportMap& support,
                    std::size_t cap = kDefaultGreedyCap);

OccupancyMeasure mixture_occupancy(const TabularCmdp& cmdp, const GreedyMix& mix);

/// Episode-level mixture value: sum_m a_m V^m and sum_m a_m W^{m,n}.
PolicyValue mixture_value(const TabularCmdp& cmdp, const GreedyMix& mix);

/// max sum a_m vbar_m  s.t. |sum a_m wbar[m][n] - rho_n| <= radius, sum a = 1, a >= eps_prime.
/// Returns nullopt when infeasible.
std::optional<std::vector<double>> solve_decomposition_opt(std::span<const double> vbar,
                                                           const std::vector<std::vector<double>>& wbar,
                                                           std::span<const double> rho, double radius,
                                                           double eps_prime);

}  // namespace cmdp
