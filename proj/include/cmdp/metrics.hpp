#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmdp/core.hpp"

namespace cmdp {

enum class Phase { kTripleQ, kPrune, kMultiPrune, kRefine, kIdentify };

std::string_view phase_name(Phase phase);

/// One executed episode: exact value of the policy that ran, plus what was realized.
struct EpisodeRecord {
  Phase phase = Phase::kTripleQ;
  double policy_value = 0.0;
  std::span<const double> policy_utilities;
  double realized_return = 0.0;
  std::span<const double> realized_utilities;
};

using EpisodeSink = std::function<void(const EpisodeRecord&)>;

/// Memoized exact values of greedy tables. Learners revisit the same tables
/// many times, so backward induction runs once per distinct table.
class GreedyValueCache {
 public:
  explicit GreedyValueCache(const TabularCmdp& cmdp, std::size_t max_entries = 1 << 16)
      : cmdp_(&cmdp), max_entries_(max_entries) {}

  const PolicyValue& value(std::span<const int> actions);

 private:
  const TabularCmdp* cmdp_;
  std::size_t max_entries_;
  std::unordered_map<std::string, PolicyValue> cache_;
  std::string key_;
  PolicyValue scratch_;
};

}  // namespace cmdp
