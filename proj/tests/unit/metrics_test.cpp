#include <cmath>
#include <sstream>

#include "doctest.h"
#include "cmdp/errors.hpp"
#include "cmdp/harness.hpp"

using namespace cmdp;

namespace {

RunMetrics constant_run(int K, double value, double utility) {
  RunMetrics m;
  m.run_id = "t";
  m.num_constraints = 1;
  const double u[1] = {utility};
  for (int k = 0; k < K; ++k) m.append({Phase::kRefine, value, u, value, u});
  return m;
}

}  // namespace

TEST_CASE("regret and violation are prefix sums") {
  const RunMetrics m = constant_run(4, 0.25, 0.75);
  const std::vector<double> rho = {0.5};
  const RegretCurves c = compute_regret_violation(m, 0.5, rho);
  CHECK(c.expected_regret == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  CHECK(c.expected_violation[0] == std::vector<double>{-0.25, -0.5, -0.75, -1.0});
  CHECK_THROWS_AS(compute_regret_violation(m, 0.5, std::vector<double>{}), DimensionError);
}

TEST_CASE("metrics csv header is exact") {
  CHECK(metrics_csv_header(2) ==
        "run_id,seed,episode,phase,policy_value,policy_utility_1,policy_utility_2,realized_return,"
        "realized_utility_1,realized_utility_2,cum_regret,cum_violation_1,cum_violation_2");
  CHECK(aggregate_csv_header(1) ==
        "bucket_start,bucket_end,mean_cum_regret,ci95_cum_regret,mean_cum_violation_1,ci95_cum_violation_1");
}

TEST_CASE("metrics csv keeps the stride and the last row") {
  const RunMetrics m = constant_run(5, 0.25, 0.75);
  const RegretCurves c = compute_regret_violation(m, 0.5, std::vector<double>{0.5});
  std::ostringstream out;
  write_metrics_csv(out, m, c, 2);
  std::istringstream in(out.str());
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  CHECK(out.str().find("t,0,5,refine,0.25,0.75,0.25,0.75,1.25,-1.25") != std::string::npos);
}

TEST_CASE("aggregate buckets report mean and normal interval") {
  std::vector<RegretCurves> runs(2);
  runs[0].expected_regret = {1, 1, 1, 1};
  runs[1].expected_regret = {3, 3, 3, 3};
  runs[0].expected_violation = {{0, 0, 0, 0}};
  runs[1].expected_violation = {{0, 0, 0, 2}};
  const auto rows = aggregate_curves(runs, 3);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bucket_start == 1);
  CHECK(rows[0].bucket_end == 3);
  CHECK(rows[1].bucket_end == 4);
  CHECK(rows[0].mean_regret == doctest::Approx(2));
  CHECK(rows[0].ci95_regret == doctest::Approx(1.96));
  CHECK(rows[1].mean_violation[0] == doctest::Approx(1));
  CHECK(rows[0].ci95_violation[0] == 0.0);

  const auto single = aggregate_curves({runs[0]}, 2);
  CHECK(single[0].ci95_regret == 0.0);
}

TEST_CASE("aggregate interval shrinks with the number of seeds") {
  RngStream rng(8);
  auto noise_runs = [&](int n) {
    std::vector<RegretCurves> runs(n);
    for (auto& r : runs) {
      r.expected_violation.resize(1);
      for (int k = 0; k < 2000; ++k) {
        // Box-Muller, unit variance.
        const double z = std::sqrt(-2.0 * std::log(1.0 - rng.uniform())) * std::cos(6.283185307179586 * rng.uniform());
        r.expected_regret.push_back(z);
        r.expected_violation[0].push_back(0.0);
      }
    }
    return runs;
  };
  auto mean_ci = [](const std::vector<AggregateRow>& rows) {
    double s = 0.0;
    for (const auto& r : rows) s += r.ci95_regret;
    return s / rows.size();
  };
  const double ci5 = mean_ci(aggregate_curves(noise_runs(5), 1));
  const double ci20 = mean_ci(aggregate_curves(noise_runs(20), 1));
  CHECK(ci5 == doctest::Approx(1.96 / std::sqrt(5.0) * 0.94).epsilon(0.05));
  CHECK(ci5 / ci20 == doctest::Approx(2.0 * 0.94 / 0.987).epsilon(0.06));
}

TEST_CASE("aggregate csv rows follow the header") {
  std::vector<RegretCurves> runs(1);
  runs[0].expected_regret = {0.5, 1.5};
  runs[0].expected_violation = {{-1, -2}};
  std::ostringstream out;
  write_aggregate_csv(out, aggregate_curves(runs, 1), 1);
  CHECK(out.str() == aggregate_csv_header(1) + "\n1,1,0.5,0,-1,0\n2,2,1.5,0,-2,0\n");
}

TEST_CASE("seeded experiments are reproducible and thread-count independent") {
  ExperimentConfig cfg;
  cfg.instance.kind = "toy";
  cfg.pri.K = 2500;
  cfg.seeds = {1, 2, 3};
  const TabularCmdp m = make_instance(cfg.instance);
  const ExperimentResult a = run_experiment(cfg, m, false);
  cfg.threads = 3;
  const ExperimentResult b = run_experiment(cfg, m, false);
  REQUIRE(a.seeds.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.seeds[i].ok);
    CHECK(a.seeds[i].final_regret == b.seeds[i].final_regret);
    CHECK(a.seeds[i].curves.expected_regret == b.seeds[i].curves.expected_regret);
  }
  CHECK(a.v_star == doctest::Approx(0.5));
}
