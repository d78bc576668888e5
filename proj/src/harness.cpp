#include "cmdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "cmdp/errors.hpp"
#include "cmdp/lp_oracle.hpp"
#include "cmdp/pri.hpp"
#include "cmdp/triple_q.hpp"

namespace cmdp {

void RunMetrics::append(const EpisodeRecord& rec) {
  phase.push_back(rec.phase);
  policy_value.push_back(rec.policy_value);
  realized_return.push_back(rec.realized_return);
  for (int n = 0; n < num_constraints; ++n) {
    policy_utility.push_back(rec.policy_utilities[n]);
    realized_utility.push_back(rec.realized_utilities[n]);
  }
}

EpisodeSink RunMetrics::sink() {
  return [this](const EpisodeRecord& rec) { append(rec); };
}

RegretCurves compute_regret_violation(const RunMetrics& m, double v_star, std::span<const double> rho) {
  const std::size_t K = m.size();
  const int N = m.num_constraints;
  if (rho.size() != static_cast<std::size_t>(N)) throw DimensionError("threshold count does not match metrics");
  RegretCurves c;
  c.expected_regret.resize(K);
  c.empirical_regret.resize(K);
  c.expected_violation.assign(N, std::vector<double>(K));
  c.empirical_violation.assign(N, std::vector<double>(K));
  double er = 0.0, pr = 0.0;
  std::vector<double> ev(N, 0.0), pv(N, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    er += v_star - m.policy_value[k];
    pr += v_star - m.realized_return[k];
    c.expected_regret[k] = er;
    c.empirical_regret[k] = pr;
    for (int n = 0; n < N; ++n) {
      ev[n] += rho[n] - m.policy_utility[k * N + n];
      pv[n] += rho[n] - m.realized_utility[k * N + n];
      c.expected_violation[n][k] = ev[n];
      c.empirical_violation[n][k] = pv[n];
    }
  }
  return c;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out << buf;
}

}  // namespace

std::string metrics_csv_header(int N) {
  std::string h = "run_id,seed,episode,phase,policy_value";
  for (int n = 1; n <= N; ++n) h += ",policy_utility_" + std::to_string(n);
  h += ",realized_return";
  for (int n = 1; n <= N; ++n) h += ",realized_utility_" + std::to_string(n);
  h += ",cum_regret";
  for (int n = 1; n <= N; ++n) h += ",cum_violation_" + std::to_string(n);
  return h;
}

void write_metrics_csv(std::ostream& out, const RunMetrics& m, const RegretCurves& c, int stride) {
  const int N = m.num_constraints;
  stride = std::max(1, stride);
  out << metrics_csv_header(N) << '\n';
  const std::size_t K = m.size();
  for (std::size_t k = 0; k < K; ++k) {
    if ((k + 1) % stride != 0 && k + 1 != K) continue;
    out << m.run_id << ',' << m.seed << ',' << k + 1 << ',' << phase_name(m.phase[k]) << ',';
    put(out, m.policy_value[k]);
    for (int n = 0; n < N; ++n) out << ',', put(out, m.policy_utility[k * N + n]);
    out << ',';
    put(out, m.realized_return[k]);
    for (int n = 0; n < N; ++n) out << ',', put(out, m.realized_utility[k * N + n]);
    out << ',';
    put(out, c.expected_regret[k]);
    for (int n = 0; n < N; ++n) out << ',', put(out, c.expected_violation[n][k]);
    out << '\n';
  }
}

std::vector<AggregateRow> aggregate_curves(const std::vector<RegretCurves>& runs, std::int64_t bucket) {
  std::vector<AggregateRow> rows;
  if (runs.empty()) return rows;
  std::size_t K = std::numeric_limits<std::size_t>::max();
  for (const auto& r : runs) K = std::min(K, r.expected_regret.size());
  if (K == 0) return rows;
  if (bucket <= 0) bucket = std::max<std::int64_t>(1, static_cast<std::int64_t>((K + 199) / 200));
  const std::size_t N = runs.front().expected_violation.size();
  const double n_runs = static_cast<double>(runs.size());

  auto stats = [&](auto&& value) {
    double sum = 0.0;
    for (const auto& r : runs) sum += value(r);
    const double mean = sum / n_runs;
    if (runs.size() < 2) return std::pair{mean, 0.0};
    double ss = 0.0;
    for (const auto& r : runs) ss += (value(r) - mean) * (value(r) - mean);
    return std::pair{mean, 1.96 * std::sqrt(ss / (n_runs - 1.0)) / std::sqrt(n_runs)};
  };

  for (std::int64_t start = 1; start <= static_cast<std::int64_t>(K); start += bucket) {
    AggregateRow row;
    row.bucket_start = start;
    row.bucket_end = std::min<std::int64_t>(start + bucket - 1, K);
    const std::size_t k = row.bucket_end - 1;
    std::tie(row.mean_regret, row.ci95_regret) = stats([&](const RegretCurves& r) { return r.expected_regret[k]; });
    for (std::size_t n = 0; n < N; ++n) {
      const auto [mean, ci] = stats([&](const RegretCurves& r) { return r.expected_violation[n][k]; });
      row.mean_violation.push_back(mean);
      row.ci95_violation.push_back(ci);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string aggregate_csv_header(int N) {
  std::string h = "bucket_start,bucket_end,mean_cum_regret,ci95_cum_regret";
  for (int n = 1; n <= N; ++n) {
    h += ",mean_cum_violation_" + std::to_string(n) + ",ci95_cum_violation_" + std::to_string(n);
  }
  return h;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows, int N) {
  out << aggregate_csv_header(N) << '\n';
  for (const auto& r : rows) {
    out << r.bucket_start << ',' << r.bucket_end << ',';
    put(out, r.mean_regret);
    out << ',';
    put(out, r.ci95_regret);
    for (int n = 0; n < N; ++n) {
      out << ',';
      put(out, r.mean_violation[n]);
      out << ',';
      put(out, r.ci95_violation[n]);
    }
    out << '\n';
  }
}

AssumptionReport assumption_probe(const TabularCmdp& cmdp, RngStream& rng, const ProbeOptions& opts) {
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions(), N = cmdp.num_constraints();
  AssumptionReport rep;
  const ExactSolution sol = solve_cmdp_exact(cmdp);

  rep.min_positive_q = std::numeric_limits<double>::infinity();
  for (double v : sol.occupancy.values())
    if (v > opts.support_tol) rep.min_positive_q = std::min(rep.min_positive_q, v);

  try {
    // Entries below the tolerance are dropped so the policy lives on the support.
    const SupportMap support = support_of(sol.occupancy, opts.support_tol);
    std::vector<double> probs(cmdp.num_state_actions(), 0.0);
    for (int h = 0; h < H; ++h)
      for (int x = 0; x < S; ++x) {
        const auto& set = support.actions(h, x);
        double total = 0.0;
        for (int a : set) total += sol.occupancy.mass(h, x, a);
        for (int a : set)
          probs[cmdp.sa_index(h, x, a)] = total > 0.0 ? sol.occupancy.mass(h, x, a) / total : 1.0 / set.size();
      }
    const GreedyMix mix = decompose(MarkovPolicy(H, S, A, std::move(probs)), support);
    rep.min_weight = *std::min_element(mix.weights.begin(), mix.weights.end());
  } catch (const BlowupError&) {
    rep.min_weight = std::numeric_limits<double>::quiet_NaN();
  }

  // Greedy policies: all of them when few enough, otherwise a uniform sample.
  std::vector<GreedyPolicy> greedy;
  const SupportMap full = SupportMap::full(H, S, A);
  if (greedy_policy_count(full) <= static_cast<std::size_t>(opts.max_greedy)) {
    greedy = enumerate_greedy_policies(full, opts.max_greedy);
  } else {
    for (int k = 0; k < opts.max_greedy; ++k) {
      std::vector<int> actions(cmdp.num_decisions());
      for (int& a : actions) a = rng.uniform_int(A);
      greedy.emplace_back(H, S, A, std::move(actions));
    }
  }
  rep.greedy_policies = static_cast<int>(greedy.size());
  rep.p_min = 1.0;
  for (const auto& g : greedy) {
    const OccupancyMeasure q = occupancy_of_policy(cmdp, g);
    for (int h = 1; h < H; ++h)
      for (int x = 0; x < S; ++x) rep.p_min = std::min(rep.p_min, q.state_mass(h, x));
  }

  // Directions q' - q*; the ratios are scale free, so q' only has to make
  // some step along the direction feasible.
  rep.gap_ratio_min = std::numeric_limits<double>::infinity();
  rep.reward_gap_ratio_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.gap_samples; ++k) {
    std::vector<double> probs(cmdp.num_state_actions());
    if (k % 2 == 0) {
      for (std::size_t d = 0; d < cmdp.num_decisions(); ++d) {
        double sum = 0.0;
        for (int a = 0; a < A; ++a) sum += probs[d * A + a] = rng.exponential();
        for (int a = 0; a < A; ++a) probs[d * A + a] /= sum;
      }
    } else {
      for (std::size_t d = 0; d < cmdp.num_decisions(); ++d) probs[d * A + rng.uniform_int(A)] = 1.0;
    }
    const MarkovPolicy pi(H, S, A, std::move(probs));
    const OccupancyMeasure q = occupancy_of_policy(cmdp, pi);
    const PolicyValue pv = linear_value(cmdp, q);
    bool feasible_direction = true;
    for (int n = 0; n < N; ++n) {
      const bool slack = sol.utilities[n] > cmdp.threshold(n) + 1e-9;
      if (!slack && pv.utilities[n] < cmdp.threshold(n) - 1e-9) feasible_direction = false;
    }
    if (!feasible_direction) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < q.values().size(); ++i) dist += std::abs(q.values()[i] - sol.occupancy.values()[i]);
    if (dist < 1e-9) continue;
    const double dv = (sol.value - pv.value) / dist;
    double best = dv;
    for (int n = 0; n < N; ++n) best = std::max(best, (sol.utilities[n] - pv.utilities[n]) / dist);
    rep.gap_ratio_min = std::min(rep.gap_ratio_min, best);
    rep.reward_gap_ratio_min = std::min(rep.reward_gap_ratio_min, dv);
    ++rep.gap_samples;
  }
  if (rep.gap_samples == 0) rep.gap_ratio_min = rep.reward_gap_ratio_min = 0.0;
  return rep;
}

namespace {

SeedOutcome run_seed(const ExperimentConfig& cfg, const TabularCmdp& cmdp, const ExactSolution& opt,
                     std::uint64_t seed, bool write_files) {
  SeedOutcome out;
  out.seed = seed;
  RunMetrics metrics;
  metrics.run_id = cfg.name + "-" + cfg.algorithm;
  metrics.seed = seed;
  metrics.num_constraints = cmdp.num_constraints();
  RngStream rng(seed);

  if (cfg.algorithm == "pri") {
    const PriResult res = pri_run(cmdp, cfg.pri, rng, metrics.sink());
    const ValueTables vt = eval_policy_exact(cmdp, res.policy);
    out.policy = res.policy;
    out.policy_value = vt.v1;
    out.policy_utilities = vt.w1;
  } else if (cfg.algorithm == "tripleq") {
    const std::int64_t K = cfg.tq_episodes > 0 ? cfg.tq_episodes : pri_schedule_length(cfg.pri);
    if (K > 2000000000) throw ConfigError("Triple-Q episode count too large");
    GreedyValueCache values(cmdp);
    EpisodeRecord rec;
    rec.phase = Phase::kTripleQ;
    tq_run(cmdp, static_cast<int>(K), SupportMap::full(cmdp.horizon(), cmdp.num_states(), cmdp.num_actions()),
           cfg.pri.triple_q, rng, [&](std::span<const int> policy, const Trajectory& traj) {
             const PolicyValue& pv = values.value(policy);
             rec.policy_value = pv.value;
             rec.policy_utilities = pv.utilities;
             rec.realized_return = traj.total_reward;
             rec.realized_utilities = traj.total_utilities;
             metrics.append(rec);
           });
  } else {
    throw ConfigError("algorithm '" + cfg.algorithm + "' does not produce episodes");
  }

  out.curves = compute_regret_violation(metrics, opt.value, cmdp.thresholds());
  out.episodes = static_cast<std::int64_t>(metrics.size());
  if (out.episodes > 0) {
    out.final_regret = out.curves.expected_regret.back();
    for (const auto& v : out.curves.expected_violation) out.final_violation.push_back(v.back());
  }
  if (write_files) {
    const auto path = std::filesystem::path(cfg.out_dir) /
                      ("metrics_" + cfg.algorithm + "_seed" + std::to_string(seed) + ".csv");
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    write_metrics_csv(f, metrics, out.curves, cfg.csv_stride);
  }
  out.ok = true;
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const TabularCmdp& cmdp, bool write_files) {
  validate_config(cfg);
  const ExactSolution opt = solve_cmdp_exact(cmdp);
  ExperimentResult res;
  res.v_star = opt.value;
  res.w_star = opt.utilities;
  res.seeds.resize(cfg.seeds.size());
  if (write_files) std::filesystem::create_directories(cfg.out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < cfg.seeds.size();) {
      try {
        res.seeds[i] = run_seed(cfg, cmdp, opt, cfg.seeds[i], write_files);
      } catch (const std::exception& e) {
        res.seeds[i].seed = cfg.seeds[i];
        res.seeds[i].ok = false;
        res.seeds[i].error = "seed " + std::to_string(cfg.seeds[i]) + ": " + e.what();
      }
    }
  };
  const int threads = std::min<int>(cfg.threads, static_cast<int>(cfg.seeds.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<RegretCurves> curves;
  for (const auto& s : res.seeds)
    if (s.ok) curves.push_back(s.curves);
  res.aggregate = aggregate_curves(curves, cfg.bucket);
  if (write_files) {
    const auto path = std::filesystem::path(cfg.out_dir) / ("aggregate_" + cfg.algorithm + ".csv");
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    write_aggregate_csv(f, res.aggregate, cmdp.num_constraints());
  }
  return res;
}

}  // namespace cmdp
