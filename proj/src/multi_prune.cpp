#include "cmdp/multi_prune.hpp"

#include <algorithm>
#include <cmath>

#include "cmdp/errors.hpp"
#include "cmdp/pri.hpp"

namespace cmdp {

int MultiPruneParams::probe_length() const {
  if (probe_episodes > 0) return probe_episodes;
  return std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(K), 0.25))));
}

double MultiPruneParams::removal_threshold() const { return 2.0 / std::pow(static_cast<double>(K), 0.03); }

double MultiPruneParams::collapse_threshold(int horizon) const {
  const double L = probe_length();
  const double H = horizon;
  return removal_threshold() + 2.0 * std::sqrt(2.0 * H * H * std::log(std::max(L, 2.0)) / L);
}

namespace {

struct Probe {
  double v = 0.0;
  std::vector<double> w;
  std::vector<double> counts;
};

Probe run_probe(const TabularCmdp& cmdp, const SupportMap& restriction, const MultiPruneParams& params,
                RngStream& rng, const EpisodeSink& sink, GreedyValueCache& values) {
  Probe p;
  p.counts.assign(cmdp.num_state_actions(), 0.0);
  const int A = cmdp.num_actions();
  const TqSummary s = tq_run(cmdp, params.probe_length(), restriction, params.triple_q, rng,
                             [&](std::span<const int> policy, const Trajectory& traj) {
                               for (std::size_t d = 0; d < policy.size(); ++d) p.counts[d * A + policy[d]] += 1.0;
                               if (!sink) return;
                               const PolicyValue& pv = values.value(policy);
                               EpisodeRecord rec;
                               rec.phase = Phase::kMultiPrune;
                               rec.policy_value = pv.value;
                               rec.policy_utilities = pv.utilities;
                               rec.realized_return = traj.total_reward;
                               rec.realized_utilities = traj.total_utilities;
                               sink(rec);
                             });
  p.v = s.avg_reward;
  p.w = s.avg_utilities;
  return p;
}

bool utilities_met(const TabularCmdp& cmdp, const std::vector<double>& w) {
  for (int n = 0; n < cmdp.num_constraints(); ++n)
    if (w[n] < cmdp.threshold(n)) return false;
  return true;
}

}  // namespace

MultiPruneResult multi_solution_prune(const TabularCmdp& cmdp, SupportMap support, double v_star,
                                      const MultiPruneParams& params, RngStream& rng,
                                      const EpisodeSink& sink) {
  const int H = cmdp.horizon(), S = cmdp.num_states();
  if (support.horizon() != H || support.num_states() != S || support.num_actions() != cmdp.num_actions()) {
    throw DimensionError("support shape does not match CMDP");
  }
  MultiPruneResult out;
  const int L = params.probe_length();
  const double remove_thr = params.removal_threshold();
  const double collapse_thr = params.collapse_threshold(H);
  std::vector<bool> flagged(cmdp.num_decisions(), false);
  GreedyValueCache values(cmdp);

  for (;;) {
    int h = -1, x = -1;
    for (int hh = 0; hh < H && h < 0; ++hh) {
      for (int xx = 0; xx < S; ++xx) {
        if (!flagged[cmdp.decision_index(hh, xx)] && support.actions(hh, xx).size() > 1) {
          h = hh;
          x = xx;
          break;
        }
      }
    }
    if (h < 0) break;
    flagged[cmdp.decision_index(h, x)] = true;

    const std::vector<int> snapshot = support.actions(h, x);
    for (int a : snapshot) {
      if (!support.contains(h, x, a)) continue;
      if (support.actions(h, x).size() <= 1) break;

      SupportMap removed = support;
      std::vector<int> rest;
      for (int b : support.actions(h, x))
        if (b != a) rest.push_back(b);
      removed.set(h, x, rest);
      Probe p = run_probe(cmdp, removed, params, rng, sink, values);
      out.episodes += L;
      bool ok = v_star - p.v <= remove_thr && utilities_met(cmdp, p.w);
      out.probes.push_back({h, x, a, false, p.v, p.w, ok});
      if (ok) {
        support = support_from_counts(p.counts, removed, L, params.eps);
        continue;
      }

      SupportMap collapsed = support;
      collapsed.set(h, x, {a});
      p = run_probe(cmdp, collapsed, params, rng, sink, values);
      out.episodes += L;
      ok = v_star - p.v <= collapse_thr && utilities_met(cmdp, p.w);
      out.probes.push_back({h, x, a, true, p.v, p.w, ok});
      if (ok) support = support_from_counts(p.counts, collapsed, L, params.eps);
    }
  }
  out.support = std::move(support);
  return out;
}

}  // namespace cmdp
