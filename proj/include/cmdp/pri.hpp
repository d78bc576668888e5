#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmdp/core.hpp"
#include "cmdp/lp_oracle.hpp"
#include "cmdp/metrics.hpp"
#include "cmdp/rng.hpp"
#include "cmdp/triple_q.hpp"

namespace cmdp {

struct PriParams {
  std::int64_t K = 10000;
  double eps = 0.1;
  double eps_prime = 0.05;
  double c_rad = 0.25;
  /// Use t*eps'*sqrt(K) instead of t*eps'*K inside the radius logarithm.
  bool radius_log_sqrt_k = false;
  /// Zero means the sqrt(K) default.
  int prune_episodes = 0;
  int refine_rounds = 0;
  int refine_episodes = 0;
  int identify_rounds = 0;
  int identify_episodes = 0;
  /// When false the run stops after refinement and outputs the mixture's policy.
  bool identify = true;
  TripleQParams triple_q;
  std::size_t greedy_cap = kDefaultGreedyCap;
  bool multi_prune = false;
  /// Zero means K^0.25.
  int probe_episodes = 0;
};

/// ceil(sqrt(K)).
int sqrt_budget(std::int64_t K);

/// D_{h,x} = {a in restriction : counts/episodes >= eps/2}; an empty set keeps
/// the allowed action with the largest count.
SupportMap support_from_counts(const std::vector<double>& counts, const SupportMap& restriction,
                               double episodes, double eps);

struct PruneResult {
  SupportMap support;
  std::vector<double> counts;  // N~_h(x,a), [h][x][a]
  double avg_reward = 0.0;
  std::vector<double> avg_utilities;
  int episodes = 0;
};

PruneResult phase1_prune(const TabularCmdp& cmdp, const PriParams& params, RngStream& rng,
                         const EpisodeSink& sink = {});

/// Largest-remainder rounding of weights * budget; ties go to the lower index.
std::vector<int> episode_allocation(const std::vector<double>& weights, int budget);

/// c_rad * sqrt(H^2 log(t eps' X) / (eps' t E)) with E the episodes per round
/// (sqrt(K) by default) and X = K, or X = E under radius_log_sqrt_k.
double refine_radius(const PriParams& params, int horizon, int t, double eps_prime, int round_episodes = 0);

struct RoundLog {
  int round = 0;         // completed data rounds behind this solve
  double radius = 0.0;   // radius actually used, after relaxation
  int relaxations = 0;
  bool feasible = true;  // false means the previous weights were kept
  std::vector<double> weights;
};

struct RefineResult {
  GreedyMix mix;
  std::vector<double> vbar;
  std::vector<std::vector<double>> wbar;
  std::vector<int> estimate_counts;
  std::vector<RoundLog> rounds;
  double eps_prime = 0.0;  // effective value after the M * eps' <= 1 guard
  int episodes = 0;
};

RefineResult phase2_refine(const TabularCmdp& cmdp, const SupportMap& support, const PriParams& params,
                           RngStream& rng, const EpisodeSink& sink = {});

struct IdentifyResult {
  MarkovPolicy policy;
  std::vector<double> counts;  // N_h(x,a)
  int episodes = 0;
};

IdentifyResult phase3_identify(const TabularCmdp& cmdp, const GreedyMix& mix, const SupportMap& support,
                               const PriParams& params, RngStream& rng, const EpisodeSink& sink = {});

struct PriResult {
  PruneResult prune;
  SupportMap support;  // after the optional multi-solution pass
  int probe_episodes = 0;
  RefineResult refine;
  IdentifyResult identify;
  MarkovPolicy policy;
  int total_episodes = 0;
};

PriResult pri_run(const TabularCmdp& cmdp, const PriParams& params, RngStream& rng,
                  const EpisodeSink& sink = {});

}  // namespace cmdp
