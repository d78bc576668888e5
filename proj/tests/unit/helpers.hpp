#pragma once

#include "cmdp/core.hpp"

namespace testing {

// One step, one state, two actions: reward on action 0, utility on action 1.
inline cmdp::TabularCmdp bandit(double rho) {
  cmdp::CmdpTables t;
  t.horizon = 1;
  t.num_states = 1;
  t.num_actions = 2;
  t.num_constraints = 1;
  t.transitions = {1.0, 1.0};
  t.rewards = {1.0, 0.0};
  t.utilities = {0.0, 1.0};
  t.thresholds = {rho};
  return cmdp::TabularCmdp(t);
}

}  // namespace testing
