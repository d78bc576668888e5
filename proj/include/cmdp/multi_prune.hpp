#pragma once

#include <cstdint>
#include <vector>

#include "cmdp/core.hpp"
#include "cmdp/metrics.hpp"
#include "cmdp/rng.hpp"
#include "cmdp/triple_q.hpp"

namespace cmdp {

struct MultiPruneParams {
  std::int64_t K = 10000;
  double eps = 0.1;
  int probe_episodes = 0;  // zero means round(K^0.25)
  TripleQParams triple_q;

  int probe_length() const;
  double removal_threshold() const;   // 2 / K^0.03
  double collapse_threshold(int horizon) const;
};

struct ProbeLog {
  int h = 0, x = 0, action = 0;
  bool collapse = false;  // false: removal probe
  double v = 0.0;
  std::vector<double> w;
  bool accepted = false;
};

struct MultiPruneResult {
  SupportMap support;
  std::vector<ProbeLog> probes;
  int episodes = 0;
};

/// Resolves multi-action decisions with short restricted Triple-Q probes.
/// v_star is the average reward of the pruning phase.
MultiPruneResult multi_solution_prune(const TabularCmdp& cmdp, SupportMap support, double v_star,
                                      const MultiPruneParams& params, RngStream& rng,
                                      const EpisodeSink& sink = {});

}  // namespace cmdp
