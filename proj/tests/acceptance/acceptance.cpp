// Acceptance suite: one line per criterion, "PASS" or "FAIL" with the measured
// quantities. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "cmdp/config.hpp"
#include "cmdp/envs.hpp"
#include "cmdp/errors.hpp"
#include "cmdp/harness.hpp"
#include "cmdp/lp_oracle.hpp"
#include "cmdp/multi_prune.hpp"
#include "cmdp/pri.hpp"
#include "cmdp/simplex.hpp"
#include "cmdp/triple_q.hpp"
#include "oracles.hpp"

using namespace cmdp;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(const char* name, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++g_failures;
  std::printf("%s  %-28s %s  [%.1fs]\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

MarkovPolicy random_markov_policy(int H, int S, int A, RngStream& rng) {
  std::vector<double> probs(static_cast<std::size_t>(H) * S * A);
  for (std::size_t d = 0; d < probs.size() / A; ++d) {
    double sum = 0.0;
    for (int a = 0; a < A; ++a) sum += probs[d * A + a] = rng.exponential();
    for (int a = 0; a < A; ++a) probs[d * A + a] /= sum;
  }
  return MarkovPolicy(H, S, A, std::move(probs));
}

// Stochastic decisions counted on reachable states, entries above tol.
int stochastic_reachable(const OccupancyMeasure& q, double tol) {
  int count = 0;
  for (int h = 0; h < q.horizon(); ++h)
    for (int x = 0; x < q.num_states(); ++x) {
      int positive = 0;
      for (int a = 0; a < q.num_actions(); ++a) positive += q.mass(h, x, a) > tol;
      count += positive > 1;
    }
  return count;
}

RunMetrics record_pri(const TabularCmdp& m, const PriParams& p, std::uint64_t seed, PriResult* result = nullptr) {
  RunMetrics metrics;
  metrics.num_constraints = m.num_constraints();
  RngStream rng(seed);
  PriResult r = pri_run(m, p, rng, metrics.sink());
  if (result) *result = std::move(r);
  return metrics;
}

RunMetrics record_tq(const TabularCmdp& m, int K, const TripleQParams& p, std::uint64_t seed) {
  RunMetrics metrics;
  metrics.num_constraints = m.num_constraints();
  GreedyValueCache values(m);
  RngStream rng(seed);
  auto sink = metrics.sink();
  tq_run(m, K, SupportMap::full(m.horizon(), m.num_states(), m.num_actions()), p, rng,
         [&](std::span<const int> policy, const Trajectory& traj) {
           const PolicyValue& pv = values.value(policy);
           EpisodeRecord rec;
           rec.phase = Phase::kTripleQ;
           rec.policy_value = pv.value;
           rec.policy_utilities = pv.utilities;
           rec.realized_return = traj.total_reward;
           rec.realized_utilities = traj.total_utilities;
           sink(rec);
         });
  return metrics;
}

// ---------------------------------------------------------------------------

Verdict limited_stochasticity() {
  const auto t0 = Clock::now();
  int worst_nonzero_slack = 1 << 30, worst_stoch_slack = 1 << 30, greedy_ok = 0, n0 = 0;
  double worst_n0_gap = 0.0;
  bool ok = true;
  std::string first_bad;
  for (int i = 0; i < 100; ++i) {
    RngStream dims(7000 + i);
    const int S = 1 + dims.uniform_int(4), A = 2 + dims.uniform_int(2), H = 1 + dims.uniform_int(3);
    const int N = i % 3;
    RngStream rng(9000 + i);
    const TabularCmdp m = random_cmdp(S, A, H, N, rng);
    const ExactSolution sol = solve_cmdp_exact(m);
    int nonzero = 0;
    for (double v : sol.occupancy.values()) nonzero += v > 1e-8;
    const int stoch = stochastic_reachable(sol.occupancy, 1e-8);
    worst_nonzero_slack = std::min(worst_nonzero_slack, H * S + N - nonzero);
    worst_stoch_slack = std::min(worst_stoch_slack, N - stoch);
    bool good = nonzero <= H * S + N && stoch <= N;
    if (N == 0) {
      ++n0;
      const double gap = std::abs(sol.value - oracle::unconstrained_optimum(m));
      worst_n0_gap = std::max(worst_n0_gap, gap);
      const bool greedy = stoch == 0 && gap <= 1e-9;
      greedy_ok += greedy;
      good = good && greedy;
    }
    if (!good && ok) first_bad = fmt(" first failure: instance %d (S=%d A=%d H=%d N=%d)", i, S, A, H, N);
    ok = ok && good;
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 30.0,
          fmt("min(HS+N-nnz)=%d min(N-stoch)=%d N=0 greedy optimal %d/%d (max gap %.1e) time %.2fs<30s%s",
              worst_nonzero_slack, worst_stoch_slack, greedy_ok, n0, worst_n0_gap, secs, first_bad.c_str())};
}

Verdict decomposition_exactness() {
  const auto t0 = Clock::now();
  double worst_l1 = 0.0, worst_sum = 0.0;
  int max_m = 0;
  for (int i = 0; i < 50; ++i) {
    RngStream rng(3100 + i);
    const int S = 2 + rng.uniform_int(3), A = 2 + rng.uniform_int(2), H = 2 + rng.uniform_int(2);
    const TabularCmdp m = random_cmdp(S, A, H, 1, rng);
    // Greedy base with up to three randomized decisions.
    std::vector<double> probs(m.num_state_actions(), 0.0);
    for (std::size_t d = 0; d < m.num_decisions(); ++d) probs[d * A + rng.uniform_int(A)] = 1.0;
    const int k = i % 4;
    std::vector<std::size_t> chosen;
    while (static_cast<int>(chosen.size()) < k) {
      const std::size_t d = rng.uniform_int(static_cast<int>(m.num_decisions()));
      if (std::find(chosen.begin(), chosen.end(), d) == chosen.end()) chosen.push_back(d);
    }
    for (std::size_t d : chosen) {
      const int width = 2 + rng.uniform_int(A - 1);
      double sum = 0.0;
      std::fill(probs.begin() + d * A, probs.begin() + (d + 1) * A, 0.0);
      for (int a = 0; a < width; ++a) sum += probs[d * A + a] = 0.05 + rng.uniform();
      for (int a = 0; a < width; ++a) probs[d * A + a] /= sum;
    }
    const MarkovPolicy pi(H, S, A, probs);
    SupportMap support(H, S, A);
    for (int h = 0; h < H; ++h)
      for (int x = 0; x < S; ++x) {
        std::vector<int> set;
        for (int a = 0; a < A; ++a)
          if (pi.prob(h, x, a) > 0.0) set.push_back(a);
        support.set(h, x, set);
      }
    const GreedyMix mix = decompose(pi, support);
    max_m = std::max(max_m, static_cast<int>(mix.policies.size()));
    const double sum = std::accumulate(mix.weights.begin(), mix.weights.end(), 0.0);
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    std::vector<double> mixed(m.num_state_actions(), 0.0);
    for (std::size_t j = 0; j < mix.policies.size(); ++j) {
      const auto q = oracle::occupancy(m, MarkovPolicy::from_greedy(mix.policies[j]));
      for (std::size_t e = 0; e < q.size(); ++e) mixed[e] += mix.weights[j] * q[e];
    }
    const auto target = oracle::occupancy(m, pi);
    double l1 = 0.0;
    for (std::size_t e = 0; e < target.size(); ++e) l1 += std::abs(mixed[e] - target[e]);
    worst_l1 = std::max(worst_l1, l1);
  }
  const double secs = seconds_since(t0);
  return {worst_l1 <= 1e-9 && worst_sum <= 1e-9 && secs < 10.0,
          fmt("max L1=%.2e<=1e-9 max|sum a-1|=%.2e<=1e-9 max M=%d time %.2fs<10s", worst_l1, worst_sum, max_m, secs)};
}

Verdict simplex_equivalence() {
  int feasible = 0, checked = 0, mismatches = 0;
  double worst = 0.0;
  std::string first_bad;
  for (int i = 0; i < 200; ++i) {
    RngStream rng(5200 + i);
    LinearProgram lp;
    const int n = 2 + rng.uniform_int(6);
    const int max_rows = std::min(5, 12 - n);
    const int extra = rng.uniform_int(max_rows);  // rows beyond the bounding row
    lp.objective.resize(n);
    for (double& c : lp.objective) c = 2.0 * rng.uniform() - 1.0;
    // A bounding row keeps every instance bounded.
    Constraint box;
    box.coefficients.assign(n, 1.0);
    box.relation = Relation::kLessEqual;
    box.rhs = 1.0 + 9.0 * rng.uniform();
    lp.rows.push_back(box);
    for (int r = 0; r < extra; ++r) {
      Constraint c;
      c.coefficients.resize(n);
      for (double& v : c.coefficients) v = std::round((2.0 * rng.uniform() - 1.0) * 8.0) / 4.0;
      const int kind = rng.uniform_int(5);
      c.relation = kind < 2 ? Relation::kLessEqual : kind < 4 ? Relation::kGreaterEqual : Relation::kEqual;
      c.rhs = std::round((2.0 * rng.uniform() - 0.5) * 8.0) / 4.0;
      lp.rows.push_back(c);
    }
    const LpSolution sol = simplex_solve(lp);
    const oracle::Enumerated ref = oracle::enumerate_bfs(lp);
    ++checked;
    bool ok;
    if (ref.feasible) {
      ++feasible;
      ok = sol.status == LpStatus::kOptimal && std::abs(sol.objective - ref.objective) <= 1e-8;
      if (sol.status == LpStatus::kOptimal) worst = std::max(worst, std::abs(sol.objective - ref.objective));
    } else {
      ok = sol.status == LpStatus::kInfeasible;
    }
    if (!ok) {
      ++mismatches;
      if (first_bad.empty())
        first_bad = fmt(" first mismatch LP %d: %s vs enumeration %s %.10g", i, to_string(sol.status).c_str(),
                        ref.feasible ? "optimal" : "infeasible", ref.objective);
    }
  }
  return {mismatches == 0, fmt("%d LPs (%d feasible), mismatches=%d, max |obj diff|=%.2e<=1e-8%s", checked,
                               feasible, mismatches, worst, first_bad.c_str())};
}

Verdict value_identities() {
  double worst_linear = 0.0, worst_oracle = 0.0, worst_mc_ratio = 0.0;
  double tol_shown = 0.0;
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    RngStream rng(4400 + i);
    const int S = 2 + rng.uniform_int(3), A = 2 + rng.uniform_int(2), H = 2 + rng.uniform_int(3);
    const int N = 1 + rng.uniform_int(2);
    const TabularCmdp m = random_cmdp(S, A, H, N, rng);
    const MarkovPolicy pi = random_markov_policy(H, S, A, rng);
    const ValueTables vt = eval_policy_exact(m, pi);
    const PolicyValue lin = linear_value(m, occupancy_of_policy(m, pi));
    const oracle::Values ref = oracle::policy_value(m, pi);
    double d = std::abs(lin.value - vt.v1);
    for (int n = 0; n < N; ++n) d = std::max(d, std::abs(lin.utilities[n] - vt.w1[n]));
    worst_linear = std::max(worst_linear, d);
    double e = std::abs(ref.v - vt.v1);
    for (int n = 0; n < N; ++n) e = std::max(e, std::abs(ref.w[n] - vt.w1[n]));
    worst_oracle = std::max(worst_oracle, e);

    const int episodes = 100000;
    const double tol = 4.0 * H * std::sqrt(std::log(1e5) / 1e5);
    tol_shown = std::max(tol_shown, tol);
    double sum_r = 0.0;
    std::vector<double> sum_g(N, 0.0);
    Trajectory traj;
    RngStream mc(77 + i);
    for (int k = 0; k < episodes; ++k) {
      sample_episode(m, pi, mc, traj);
      sum_r += traj.total_reward;
      for (int n = 0; n < N; ++n) sum_g[n] += traj.total_utilities[n];
    }
    double dev = std::abs(sum_r / episodes - vt.v1);
    for (int n = 0; n < N; ++n) dev = std::max(dev, std::abs(sum_g[n] / episodes - vt.w1[n]));
    worst_mc_ratio = std::max(worst_mc_ratio, dev / tol);
    ok = ok && d <= 1e-9 && e <= 1e-9 && dev <= tol;
  }
  return {ok, fmt("max|sum q.r - V1|=%.2e<=1e-9 max|V1 - reference|=%.2e max MC deviation/tolerance=%.3f<=1",
                  worst_linear, worst_oracle, worst_mc_ratio)};
}

Verdict pruning() {
  PriParams p;
  p.K = 1000000;  // sqrt(K) = 1000 pruning episodes
  p.eps = 0.1;
  std::vector<TabularCmdp> instances = {toy_cmdp()};
  std::vector<std::string> names = {"toy"};
  for (std::uint64_t seed = 1000; instances.size() < 6; ++seed) {
    RngStream rng(seed);
    RandomCmdpOptions opts;
    opts.unique_solution = true;
    TabularCmdp m = random_cmdp(2, 2, 2, 1, rng, opts);
    RngStream probe_rng(seed);
    if (assumption_probe(m, probe_rng).min_positive_q < p.eps) continue;
    instances.push_back(std::move(m));
    names.push_back("rand" + std::to_string(seed));
  }
  std::string detail;
  bool ok = true;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const TabularCmdp& m = instances[i];
    const SupportMap target = support_of(solve_cmdp_exact(m).occupancy, 1e-8);
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      RngStream rng(seed);
      hits += phase1_prune(m, p, rng).support == target;
    }
    ok = ok && hits >= 18;
    detail += fmt("%s %d/20 ", names[i].c_str(), hits);
  }
  return {ok, detail + "(need >=18/20 each)"};
}

Verdict refinement_convergence() {
  const TabularCmdp m = toy_cmdp();
  const ExactSolution star = solve_cmdp_exact(m);
  const SupportMap full = SupportMap::full(1, 1, 2);
  PriParams p;
  p.K = 10000;
  const GreedyMix target = decompose(star.policy, full);
  int gap_ok = 0, radius_ok = 0;
  double worst_ratio = 0.0, worst_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream rng(seed);
    const RefineResult r = phase2_refine(m, full, p, rng);
    bool within = true;
    const int E = sqrt_budget(p.K);
    for (const RoundLog& log : r.rounds) {
      if (log.round < 2) continue;
      double dev = 0.0;
      for (std::size_t j = 0; j < log.weights.size(); ++j)
        dev = std::max(dev, std::abs(log.weights[j] - target.weights[j]));
      const double radius = refine_radius(p, m.horizon(), log.round, r.eps_prime, E);
      worst_ratio = std::max(worst_ratio, dev / radius);
      within = within && dev <= 3.0 * radius;
    }
    radius_ok += within;
    const double gap = std::abs(star.value - mixture_value(m, r.mix).value);
    worst_gap = std::max(worst_gap, gap);
    gap_ok += gap <= 0.05;
  }
  return {radius_ok == 5 && gap_ok >= 4,
          fmt("|a-a*|<=3r(t) for all t>=2 in %d/5 seeds (max ratio %.2f), |V*-V_mix|<=0.05 in %d/5 (max %.4f)",
              radius_ok, worst_ratio, gap_ok, worst_gap)};
}

Verdict identification() {
  const TabularCmdp m = toy_cmdp();
  const ExactSolution star = solve_cmdp_exact(m);
  const auto reach = reachable_decisions(star.occupancy);
  PriParams p;
  p.K = 10000;
  int good = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream rng(seed);
    const PriResult r = pri_run(m, p, rng);
    bool ok = true;
    for (int h = 0; h < m.horizon(); ++h)
      for (int x = 0; x < m.num_states(); ++x) {
        if (!reach[m.decision_index(h, x)]) continue;
        const bool greedy = star.policy.is_greedy_at(h, x);
        for (int a = 0; a < m.num_actions(); ++a) {
          const double d = std::abs(r.policy.prob(h, x, a) - star.policy.prob(h, x, a));
          worst = std::max(worst, d);
          ok = ok && (greedy ? d == 0.0 : d <= 0.05);
        }
      }
    good += ok;
  }
  return {good >= 4, fmt("%d/5 seeds within 0.05 on stochastic and exact on greedy decisions (max dev %.4f)", good,
                         worst)};
}

struct ShapeStats {
  double first = 0.0, last = 0.0, final_avg = 0.0;
  std::int64_t episodes = 0;
};

ShapeStats regret_shape(const TabularCmdp& m, double v_star, std::int64_t K) {
  PriParams p;
  p.K = K;
  p.prune_episodes = static_cast<int>(K / 2);
  p.identify = false;
  ShapeStats s;
  const int seeds = 5;
  for (int seed = 1; seed <= seeds; ++seed) {
    const RunMetrics metrics = record_pri(m, p, seed);
    const RegretCurves c = compute_regret_violation(metrics, v_star, m.thresholds());
    const auto& cum = c.expected_regret;
    const std::int64_t n = static_cast<std::int64_t>(cum.size()), t = n / 10;
    s.first += cum[t - 1] / t / seeds;
    s.last += (cum[n - 1] - cum[n - t - 1]) / t / seeds;
    s.final_avg += cum[n - 1] / n / seeds;
    s.episodes = n;
  }
  return s;
}

Verdict sublinear_regret() {
  const TabularCmdp m = synthetic_cmdp();
  const double v_star = solve_cmdp_exact(m).value;
  const ShapeStats a = regret_shape(m, v_star, 40000);
  const ShapeStats b = regret_shape(m, v_star, 80000);
  const double factor = std::abs(a.final_avg) / std::abs(b.final_avg);
  const bool shape = a.first > 0.0 && a.last <= 0.2 * a.first;

  // Full synthetic schedule, one seed.
  ExperimentConfig cfg = config_from_json({{"instance", {{"kind", "synthetic"}}}, {"seeds", {1}}});
  const auto t0 = Clock::now();
  const ExperimentResult full = run_experiment(cfg, m, false);
  const double secs = seconds_since(t0);
  const bool full_ok = full.seeds.size() == 1 && full.seeds[0].ok && secs < 600.0;
  const double full_value = full_ok ? full.seeds[0].policy_value : std::nan("");
  return {shape && factor >= 1.3 && full_ok,
          fmt("K=4e4: first10%%=%.5f last10%%=%.5f (<=20%%: %s); final avg regret %.5f -> %.5f at 2K, factor "
              "%.3f>=1.3; full %lld-episode run %.1fs<600s, V*=%.6f V(pi)=%.6f",
              a.first, a.last, shape ? "yes" : "no", a.final_avg, b.final_avg, factor,
              static_cast<long long>(full_ok ? full.seeds[0].episodes : 0), secs, v_star, full_value)};
}

Verdict triple_q_contract() {
  const TabularCmdp m = synthetic_cmdp();
  const double v_star = solve_cmdp_exact(m).value;
  const int K = 100000;
  int good = 0;
  std::string values;
  for (int seed = 1; seed <= 5; ++seed) {
    const RunMetrics metrics = record_tq(m, K, TripleQParams{}, seed);
    const RegretCurves c = compute_regret_violation(metrics, v_star, m.thresholds());
    const double tail = c.expected_violation[0][K - 1] - c.expected_violation[0][K / 10 - 1];
    good += tail <= 0.0;
    values += fmt(" %.1f", tail);
  }
  return {good >= 4, fmt("post burn-in cumulative expected violation <=0 in %d/5 seeds:%s", good, values.c_str())};
}

Verdict multi_solution_pruning() {
  // One-step problem with a copy of the reward action, so the optimum has two
  // extreme points. The removal and collapse thresholds fall below the 0.85
  // gap between the optimum and the utility-only policy only for very large K.
  CmdpTables t;
  t.horizon = 1;
  t.num_states = 1;
  t.num_actions = 2;
  t.num_constraints = 1;
  t.transitions = {1.0, 1.0};
  t.rewards = {1.0, 0.0};
  t.utilities = {0.0, 1.0};
  t.thresholds = {0.15};
  const TabularCmdp m = with_duplicated_action(TabularCmdp(t), 0);
  const double v_star = solve_cmdp_exact(m).value;
  MultiPruneParams mp;
  mp.K = 10000000000000000LL;  // K^0.25 = 1e4 episodes per probe
  const int budget = 2 * m.horizon() * m.num_states() * m.num_actions() * mp.probe_length();
  int good = 0, worst_episodes = 0, multi_in = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PriParams p;
    p.K = mp.K;
    p.prune_episodes = 100000;
    RngStream rng(seed);
    const PruneResult pr = phase1_prune(m, p, rng);
    multi_in += pr.support.multi_action_count() > 0;
    RngStream probe_rng = rng.derive(2);
    const MultiPruneResult r = multi_solution_prune(m, pr.support, pr.avg_reward, mp, probe_rng);
    worst_episodes = std::max(worst_episodes, r.episodes);
    bool ok = r.episodes <= budget;
    std::string set;
    for (int a : r.support.actions(0, 0)) set += std::to_string(a);
    try {
      const ExactSolution restricted = solve_cmdp_restricted(m, r.support);
      ok = ok && restricted.stochastic_count <= m.num_constraints() && std::abs(restricted.value - v_star) <= 1e-6;
      detail += fmt(" {%s}:%.3f", set.c_str(), restricted.value);
    } catch (const InfeasibleError&) {
      ok = false;
      detail += fmt(" {%s}:infeasible", set.c_str());
    }
    good += ok;
  }
  return {good == 5 && multi_in == 5,
          fmt("%d/5 seeds keep V*=%.3f (support:value%s), max probe episodes %d<=%d", good, v_star, detail.c_str(),
              worst_episodes, budget)};
}

Verdict grid_world() {
  const TabularCmdp m = gridworld_cmdp(default_grid_map(), 6);
  const double v_star = solve_cmdp_exact(m).value;
  ExperimentConfig cfg = config_from_json({{"instance", {{"kind", "grid"}}},
                                           {"K", 500000},
                                           {"prune_episodes", 20000},
                                           {"multi_prune", true}});
  int better = 0;
  std::string detail;
  for (int seed = 1; seed <= 5; ++seed) {
    PriResult result;
    RunMetrics pri_metrics;
    try {
      pri_metrics = record_pri(m, cfg.pri, seed, &result);
    } catch (const std::exception& e) {
      detail += fmt(" seed%d: %s;", seed, e.what());
      continue;
    }
    const auto pri_curves = compute_regret_violation(pri_metrics, v_star, m.thresholds());
    const int n = static_cast<int>(pri_metrics.size());
    const RunMetrics tq_metrics = record_tq(m, n, cfg.pri.triple_q, seed);
    const auto tq_curves = compute_regret_violation(tq_metrics, v_star, m.thresholds());
    const double a = pri_curves.expected_regret.back(), b = tq_curves.expected_regret.back();
    better += a < b;
    detail += fmt(" %.0f vs %.0f;", a, b);
  }
  return {better >= 4, fmt("PRI < Triple-Q final cumulative regret in %d/5 seeds:%s", better, detail.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const char* only = argc > 1 ? argv[1] : nullptr;
  struct Entry {
    const char* name;
    Verdict (*fn)();
  };
  const Entry entries[] = {
      {"limited-stochasticity", limited_stochasticity},
      {"decomposition-exactness", decomposition_exactness},
      {"simplex-oracle-equivalence", simplex_equivalence},
      {"value-identities", value_identities},
      {"pruning", pruning},
      {"refinement-convergence", refinement_convergence},
      {"identification", identification},
      {"sublinear-regret-shape", sublinear_regret},
      {"triple-q-contract", triple_q_contract},
      {"multi-solution-pruning", multi_solution_pruning},
      {"grid-world", grid_world},
  };
  for (const Entry& e : entries) {
    if (only && std::strcmp(only, e.name) != 0) continue;
    report(e.name, e.fn);
  }
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
