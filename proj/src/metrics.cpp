#include "cmdp/metrics.hpp"

#include <cstring>

namespace cmdp {

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::kTripleQ: return "tripleq";
    case Phase::kPrune: return "prune";
    case Phase::kMultiPrune: return "multiprune";
    case Phase::kRefine: return "refine";
    case Phase::kIdentify: return "identify";
  }
  return "unknown";
}

const PolicyValue& GreedyValueCache::value(std::span<const int> actions) {
  key_.resize(actions.size() * sizeof(int));
  std::memcpy(key_.data(), actions.data(), key_.size());
  if (auto it = cache_.find(key_); it != cache_.end()) return it->second;
  const GreedyPolicy g(cmdp_->horizon(), cmdp_->num_states(), cmdp_->num_actions(),
                       std::vector<int>(actions.begin(), actions.end()));
  if (cache_.size() >= max_entries_) {
    scratch_ = eval_greedy(*cmdp_, g);
    return scratch_;
  }
  return cache_.emplace(key_, eval_greedy(*cmdp_, g)).first->second;
}

}  // namespace cmdp
