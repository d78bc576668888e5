#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmdp/config.hpp"
#include "cmdp/core.hpp"
#include "cmdp/metrics.hpp"
#include "cmdp/rng.hpp"

namespace cmdp {

/// Per-episode record stream of one run. Utilities are stored [k*N + n].
struct RunMetrics {
  std::string run_id;
  std::uint64_t seed = 0;
  int num_constraints = 0;
  std::vector<Phase> phase;
  std::vector<double> policy_value;
  std::vector<double> policy_utility;
  std::vector<double> realized_return;
  std::vector<double> realized_utility;

  std::size_t size() const { return phase.size(); }
  void append(const EpisodeRecord& rec);
  /// A sink that appends to this object; it must outlive the sink.
  EpisodeSink sink();
};

/// Prefix sums; violation curves are indexed [n][k].
struct RegretCurves {
  std::vector<double> expected_regret;
  std::vector<double> empirical_regret;
  std::vector<std::vector<double>> expected_violation;
  std::vector<std::vector<double>> empirical_violation;
};

RegretCurves compute_regret_violation(const RunMetrics& metrics, double v_star, std::span<const double> rho);

std::string metrics_csv_header(int num_constraints);
/// One row per `stride`-th episode (the last episode is always written).
void write_metrics_csv(std::ostream& out, const RunMetrics& metrics, const RegretCurves& curves, int stride = 1);

struct AggregateRow {
  std::int64_t bucket_start = 0;  // 1-based episode indices, inclusive
  std::int64_t bucket_end = 0;
  double mean_regret = 0.0;
  double ci95_regret = 0.0;
  std::vector<double> mean_violation;
  std::vector<double> ci95_violation;
};

/// Mean and 1.96 s / sqrt(n) of the cumulative expected curves at each bucket end,
/// over runs truncated to the shortest one.
std::vector<AggregateRow> aggregate_curves(const std::vector<RegretCurves>& runs, std::int64_t bucket);

std::string aggregate_csv_header(int num_constraints);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows, int num_constraints);

struct AssumptionReport {
  double min_positive_q = 0.0;     // smallest q* entry above the support tolerance
  double min_weight = 0.0;         // smallest a*_m, NaN when the decomposition exceeds the cap
  double p_min = 1.0;              // min Pr(x_h = x), h >= 1, over the evaluated greedy policies
  int greedy_policies = 0;
  double gap_ratio_min = 0.0;      // min over samples of max(dV, dW_n) / ||q* - q||_1
  double reward_gap_ratio_min = 0.0;
  int gap_samples = 0;
  bool eps_ok(double eps) const { return min_positive_q >= eps; }
  bool eps_prime_ok(double eps_prime) const { return min_weight >= eps_prime; }
};

struct ProbeOptions {
  int max_greedy = 1000;
  int gap_samples = 200;
  double support_tol = 1e-8;
};

AssumptionReport assumption_probe(const TabularCmdp& cmdp, RngStream& rng, const ProbeOptions& opts = {});

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::int64_t episodes = 0;
  double final_regret = 0.0;
  std::vector<double> final_violation;
  std::optional<MarkovPolicy> policy;  // PRI output
  double policy_value = 0.0;
  std::vector<double> policy_utilities;
  RegretCurves curves;
};

struct ExperimentResult {
  double v_star = 0.0;
  std::vector<double> w_star;
  std::vector<SeedOutcome> seeds;
  std::vector<AggregateRow> aggregate;
};

/// Runs the configured algorithm once per seed, concurrently up to cfg.threads.
/// With write_files, per-seed CSVs and aggregate.csv go to cfg.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const TabularCmdp& cmdp, bool write_files = true);

}  // namespace cmdp
