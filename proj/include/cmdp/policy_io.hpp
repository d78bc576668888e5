#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmdp/core.hpp"
#include "cmdp/lp_oracle.hpp"

namespace cmdp {

/// Text policy file:
///   lines starting with '#' are comments,
///   first data line "H S A",
///   then H*S rows "h x p_0 ... p_{A-1}" (0-based h and x, any order, each exactly once).
void write_policy(std::ostream& out, const MarkovPolicy& policy, const std::vector<std::string>& comments = {});
MarkovPolicy read_policy(std::istream& in);
void save_policy(const MarkovPolicy& policy, const std::string& path, const std::vector<std::string>& comments = {});
MarkovPolicy load_policy(const std::string& path);

/// "# weight w" followed by the member's H*S action rows "h x a", per member.
void write_greedy_mix(std::ostream& out, const GreedyMix& mix, double l1_error);

}  // namespace cmdp
