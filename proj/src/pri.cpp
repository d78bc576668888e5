#include "cmdp/pri.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmdp/errors.hpp"
#include "cmdp/multi_prune.hpp"

namespace cmdp {

namespace {

void check_params(const PriParams& p) {
  if (p.K < 1) throw ValidationError("K must be positive");
  if (!(p.eps > 0.0 && p.eps <= 1.0)) throw ValidationError("eps must lie in (0, 1]");
  if (!(p.eps_prime > 0.0 && p.eps_prime < 1.0)) throw ValidationError("eps_prime must lie in (0, 1)");
  if (!(p.c_rad >= 0.0)) throw ValidationError("c_rad must be nonnegative");
}

int or_default(int value, int fallback) { return value > 0 ? value : fallback; }

void emit(const EpisodeSink& sink, Phase phase, const PolicyValue& pv, const Trajectory& traj) {
  if (!sink) return;
  EpisodeRecord rec;
  rec.phase = phase;
  rec.policy_value = pv.value;
  rec.policy_utilities = pv.utilities;
  rec.realized_return = traj.total_reward;
  rec.realized_utilities = traj.total_utilities;
  sink(rec);
}

}  // namespace

int sqrt_budget(std::int64_t K) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(K)));
  while (r * r < K) ++r;
  while (r > 1 && (r - 1) * (r - 1) >= K) --r;
  return static_cast<int>(r);
}

SupportMap support_from_counts(const std::vector<double>& counts, const SupportMap& restriction,
                               double episodes, double eps) {
  const int H = restriction.horizon(), S = restriction.num_states(), A = restriction.num_actions();
  if (counts.size() != static_cast<std::size_t>(H) * S * A) throw DimensionError("count table has wrong size");
  SupportMap out(H, S, A);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      const std::size_t base = (static_cast<std::size_t>(h) * S + x) * A;
      std::vector<int> set;
      int best = restriction.actions(h, x).front();
      for (int a : restriction.actions(h, x)) {
        if (counts[base + a] / episodes >= eps / 2.0 - 1e-12) set.push_back(a);
        if (counts[base + a] > counts[base + best]) best = a;
      }
      if (set.empty()) set.push_back(best);
      out.set(h, x, std::move(set));
    }
  }
  return out;
}

PruneResult phase1_prune(const TabularCmdp& cmdp, const PriParams& params, RngStream& rng,
                         const EpisodeSink& sink) {
  check_params(params);
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions();
  const int L = or_default(params.prune_episodes, sqrt_budget(params.K));
  const SupportMap full = SupportMap::full(H, S, A);

  PruneResult out;
  out.counts.assign(cmdp.num_state_actions(), 0.0);
  GreedyValueCache values(cmdp);
  const TqSummary summary = tq_run(cmdp, L, full, params.triple_q, rng,
                                   [&](std::span<const int> policy, const Trajectory& traj) {
                                     for (std::size_t d = 0; d < policy.size(); ++d) {
                                       out.counts[d * A + policy[d]] += 1.0;
                                     }
                                     if (sink) emit(sink, Phase::kPrune, values.value(policy), traj);
                                   });
  out.avg_reward = summary.avg_reward;
  out.avg_utilities = summary.avg_utilities;
  out.episodes = L;
  out.support = support_from_counts(out.counts, full, L, params.eps);
  return out;
}

std::vector<int> episode_allocation(const std::vector<double>& weights, int budget) {
  if (budget < 0) throw ValidationError("episode budget must be nonnegative");
  const std::size_t M = weights.size();
  std::vector<int> counts(M, 0);
  if (M == 0) return counts;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ValidationError("allocation weights must have positive sum");
  std::vector<double> frac(M);
  int assigned = 0;
  for (std::size_t m = 0; m < M; ++m) {
    const double share = weights[m] / total * budget;
    counts[m] = static_cast<int>(std::floor(share + 1e-12));
    frac[m] = share - counts[m];
    assigned += counts[m];
  }
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-12; });
  for (std::size_t k = 0; assigned < budget; k = (k + 1) % M, ++assigned) ++counts[order[k]];
  while (assigned > budget) {
    // Only reachable through the floor guard; trim the largest counts.
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  return counts;
}

double refine_radius(const PriParams& params, int horizon, int t, double eps_prime, int round_episodes) {
  const double root = round_episodes > 0 ? round_episodes : sqrt_budget(params.K);
  const double scale = params.radius_log_sqrt_k ? root : static_cast<double>(params.K);
  const double log_term = std::log(std::max(std::exp(1.0), t * eps_prime * scale));
  return params.c_rad * std::sqrt(static_cast<double>(horizon) * horizon * log_term / (eps_prime * t * root));
}

RefineResult phase2_refine(const TabularCmdp& cmdp, const SupportMap& support, const PriParams& params,
                           RngStream& rng, const EpisodeSink& sink) {
  check_params(params);
  const int N = cmdp.num_constraints();
  RefineResult out;
  const auto policies = enumerate_greedy_policies(support, params.greedy_cap);
  const std::size_t M = policies.size();
  out.mix.policies = policies;

  const int root = sqrt_budget(params.K);
  const int R = or_default(params.refine_rounds, root);
  const int E = or_default(params.refine_episodes, root);
  out.eps_prime = params.eps_prime * M <= 1.0 ? params.eps_prime : 0.5 / M;
  const int quota = static_cast<int>(std::ceil(out.eps_prime * E - 1e-12));

  std::vector<PolicyValue> exact(M);
  for (std::size_t m = 0; m < M; ++m) exact[m] = eval_greedy(cmdp, policies[m]);

  std::vector<double> weights(M, 1.0 / M);
  std::vector<double> vsum(M, 0.0);
  std::vector<std::vector<double>> wsum(M, std::vector<double>(N, 0.0));
  out.estimate_counts.assign(M, 0);
  out.vbar.assign(M, 0.0);
  out.wbar.assign(M, std::vector<double>(N, 0.0));
  Trajectory traj;

  for (int t = 1; t <= R; ++t) {
    const auto alloc = episode_allocation(weights, E);
    for (std::size_t m = 0; m < M; ++m) {
      for (int k = 0; k < alloc[m]; ++k) {
        sample_episode(cmdp, policies[m], rng, traj);
        if (k < quota) {
          vsum[m] += traj.total_reward;
          for (int n = 0; n < N; ++n) wsum[m][n] += traj.total_utilities[n];
          ++out.estimate_counts[m];
        }
        emit(sink, Phase::kRefine, exact[m], traj);
        ++out.episodes;
      }
    }
    // Policies with no estimation data yet keep zero estimates.
    for (std::size_t m = 0; m < M; ++m) {
      if (out.estimate_counts[m] == 0) continue;
      out.vbar[m] = vsum[m] / out.estimate_counts[m];
      for (int n = 0; n < N; ++n) out.wbar[m][n] = wsum[m][n] / out.estimate_counts[m];
    }

    RoundLog log;
    log.round = t;
    log.radius = refine_radius(params, cmdp.horizon(), t, out.eps_prime, E);
    std::optional<std::vector<double>> next;
    for (;;) {
      next = solve_decomposition_opt(out.vbar, out.wbar, cmdp.thresholds(), log.radius, out.eps_prime);
      if (next || log.relaxations == 4) break;
      log.radius *= 2.0;
      ++log.relaxations;
    }
    log.feasible = next.has_value();
    if (next) weights = *next;
    log.weights = weights;
    out.rounds.push_back(std::move(log));
  }
  out.mix.weights = weights;
  return out;
}

IdentifyResult phase3_identify(const TabularCmdp& cmdp, const GreedyMix& mix, const SupportMap& support,
                               const PriParams& params, RngStream& rng, const EpisodeSink& sink) {
  check_params(params);
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions();
  const std::size_t M = mix.policies.size();
  if (M == 0 || mix.weights.size() != M) throw ValidationError("identification needs a nonempty mixture");
  const int root = sqrt_budget(params.K);
  const int R = or_default(params.identify_rounds, root);
  const int E = or_default(params.identify_episodes, root);

  std::vector<PolicyValue> exact(M);
  for (std::size_t m = 0; m < M; ++m) exact[m] = eval_greedy(cmdp, mix.policies[m]);

  IdentifyResult out;
  out.counts.assign(cmdp.num_state_actions(), 0.0);
  Trajectory traj;
  const auto alloc = episode_allocation(mix.weights, E);
  for (int t = 0; t < R; ++t) {
    for (std::size_t m = 0; m < M; ++m) {
      for (int k = 0; k < alloc[m]; ++k) {
        sample_episode(cmdp, mix.policies[m], rng, traj);
        for (int h = 0; h < H; ++h) out.counts[cmdp.sa_index(h, traj.states[h], traj.actions[h])] += 1.0;
        emit(sink, Phase::kIdentify, exact[m], traj);
        ++out.episodes;
      }
    }
  }

  std::vector<double> probs(cmdp.num_state_actions(), 0.0);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      const std::size_t base = cmdp.sa_index(h, x, 0);
      double total = 0.0;
      for (int a = 0; a < A; ++a) total += out.counts[base + a];
      if (total > 0.0) {
        for (int a = 0; a < A; ++a) probs[base + a] = out.counts[base + a] / total;
      } else {
        const auto& set = support.actions(h, x);
        for (int a : set) probs[base + a] = 1.0 / set.size();
      }
    }
  }
  out.policy = MarkovPolicy(H, S, A, std::move(probs));
  return out;
}

PriResult pri_run(const TabularCmdp& cmdp, const PriParams& params, RngStream& rng, const EpisodeSink& sink) {
  check_params(params);
  PriResult out;
  RngStream prune_rng = rng.derive(1);
  out.prune = phase1_prune(cmdp, params, prune_rng, sink);
  out.support = out.prune.support;
  out.total_episodes = out.prune.episodes;

  if (params.multi_prune && out.support.multi_action_count() > 0) {
    MultiPruneParams mp;
    mp.K = params.K;
    mp.eps = params.eps;
    mp.probe_episodes = params.probe_episodes;
    mp.triple_q = params.triple_q;
    RngStream probe_rng = rng.derive(2);
    auto pruned = multi_solution_prune(cmdp, out.support, out.prune.avg_reward, mp, probe_rng, sink);
    out.support = std::move(pruned.support);
    out.probe_episodes = pruned.episodes;
    out.total_episodes += pruned.episodes;
  }

  RngStream refine_rng = rng.derive(3);
  out.refine = phase2_refine(cmdp, out.support, params, refine_rng, sink);
  out.total_episodes += out.refine.episodes;

  if (!params.identify) {
    const OccupancyMeasure q = mixture_occupancy(cmdp, out.refine.mix);
    out.policy = policy_of_occupancy(q, MarkovPolicy::uniform_over(out.support));
    return out;
  }

  RngStream identify_rng = rng.derive(4);
  out.identify = phase3_identify(cmdp, out.refine.mix, out.support, params, identify_rng, sink);
  out.total_episodes += out.identify.episodes;
  out.policy = out.identify.policy;
  return out;
}

}  // namespace cmdp
