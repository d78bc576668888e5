#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmdp/rng.hpp"

namespace cmdp {

/// Tolerance for exact linear-algebra identities (row sums, flow balance).
inline constexpr double kIdentityTol = 1e-9;
/// Below this, a visit probability is treated as zero.
inline constexpr double kZeroMass = 1e-12;

/// Raw tables of an episodic CMDP. All arrays are row-major, steps 0-based:
///   P[h][x][a][x'], r[h][x][a], g[n][h][x][a], rho[n].
struct CmdpTables {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  int num_constraints = 0;
  int initial_state = 0;
  std::vector<double> transitions;
  std::vector<double> rewards;
  std::vector<double> utilities;
  std::vector<double> thresholds;
};

struct Transition {
  int next;
  double prob;
};

/// Validated, immutable finite-horizon CMDP with a fixed initial state.
class TabularCmdp {
 public:
  /// Throws ValidationError / DimensionError when the tables are inconsistent.
  explicit TabularCmdp(CmdpTables tables);

  int horizon() const { return t_.horizon; }
  int num_states() const { return t_.num_states; }
  int num_actions() const { return t_.num_actions; }
  int num_constraints() const { return t_.num_constraints; }
  int initial_state() const { return t_.initial_state; }

  std::size_t sa_index(int h, int x, int a) const {
    return (static_cast<std::size_t>(h) * t_.num_states + x) * t_.num_actions + a;
  }
  std::size_t decision_index(int h, int x) const {
    return static_cast<std::size_t>(h) * t_.num_states + x;
  }
  std::size_t num_decisions() const {
    return static_cast<std::size_t>(t_.horizon) * t_.num_states;
  }
  std::size_t num_state_actions() const { return num_decisions() * t_.num_actions; }

  double transition(int h, int x, int a, int next) const {
    return t_.transitions[sa_index(h, x, a) * t_.num_states + next];
  }
  double reward(int h, int x, int a) const { return t_.rewards[sa_index(h, x, a)]; }
  double utility(int n, int h, int x, int a) const {
    return t_.utilities[n * num_state_actions() + sa_index(h, x, a)];
  }
  double threshold(int n) const { return t_.thresholds[n]; }
  std::span<const double> thresholds() const { return t_.thresholds; }

  /// Nonzero entries of P_h(.|x,a) in increasing next-state order.
  std::span<const Transition> successors(int h, int x, int a) const;

  const CmdpTables& tables() const { return t_; }

 private:
  CmdpTables t_;
  std::vector<Transition> succ_;
  std::vector<std::size_t> succ_begin_;
};

/// Per-(h,x) sets of candidate actions, sorted ascending and never empty.
class SupportMap {
 public:
  SupportMap() = default;
  SupportMap(int horizon, int num_states, int num_actions);

  /// Every set equal to the full action set.
  static SupportMap full(int horizon, int num_states, int num_actions);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  std::size_t num_decisions() const { return sets_.size(); }

  const std::vector<int>& actions(int h, int x) const { return sets_[index(h, x)]; }
  /// Replaces a set; throws ValidationError on an empty or out-of-range set.
  void set(int h, int x, std::vector<int> actions);
  bool contains(int h, int x, int a) const;

  /// Number of (h,x) with more than one candidate action.
  int multi_action_count() const;

  bool operator==(const SupportMap& other) const = default;

 private:
  std::size_t index(int h, int x) const {
    return static_cast<std::size_t>(h) * num_states_ + x;
  }

  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<std::vector<int>> sets_;
};

/// Deterministic Markov policy: one action per (h,x).
class GreedyPolicy {
 public:
  GreedyPolicy() = default;
  GreedyPolicy(int horizon, int num_states, int num_actions, std::vector<int> actions);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int action(int h, int x) const { return actions_[static_cast<std::size_t>(h) * num_states_ + x]; }
  const std::vector<int>& actions() const { return actions_; }

  bool operator==(const GreedyPolicy& other) const = default;

 private:
  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<int> actions_;
};

/// Stochastic Markov policy pi_h(a|x).
class MarkovPolicy {
 public:
  MarkovPolicy() = default;
  /// Throws ValidationError unless every row is a probability vector.
  MarkovPolicy(int horizon, int num_states, int num_actions, std::vector<double> probs);

  static MarkovPolicy uniform(int horizon, int num_states, int num_actions);
  static MarkovPolicy from_greedy(const GreedyPolicy& greedy);
  /// Uniform over each (h,x) set of the support map.
  static MarkovPolicy uniform_over(const SupportMap& support);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double prob(int h, int x, int a) const { return probs_[offset(h, x) + a]; }
  std::span<const double> row(int h, int x) const {
    return {probs_.data() + offset(h, x), static_cast<std::size_t>(num_actions_)};
  }
  const std::vector<double>& probs() const { return probs_; }

  /// True when exactly one entry of the row equals one.
  bool is_greedy_at(int h, int x) const;
  bool is_greedy() const;
  /// Lowest-index action with the largest probability.
  int argmax_action(int h, int x) const;

 private:
  std::size_t offset(int h, int x) const {
    return (static_cast<std::size_t>(h) * num_states_ + x) * num_actions_;
  }

  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> probs_;
};

/// q_h(x,a): probability of visiting (x,a) at step h.
class OccupancyMeasure {
 public:
  OccupancyMeasure() = default;
  OccupancyMeasure(int horizon, int num_states, int num_actions, std::vector<double> mass);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double mass(int h, int x, int a) const { return mass_[offset(h, x) + a]; }
  double state_mass(int h, int x) const;
  const std::vector<double>& values() const { return mass_; }

  /// Max violation over nonnegativity, initial-mass and flow constraints.
  double max_invariant_violation(const TabularCmdp& cmdp) const;

 private:
  std::size_t offset(int h, int x) const {
    return (static_cast<std::size_t>(h) * num_states_ + x) * num_actions_;
  }

  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> mass_;
};

/// One sampled episode. utilities are stored step-major: [h * N + n].
struct Trajectory {
  std::vector<int> states;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> utilities;
  double total_reward = 0.0;
  std::vector<double> total_utilities;

  double utility(int h, int n) const {
    return utilities[static_cast<std::size_t>(h) * total_utilities.size() + n];
  }
};

/// Exact value tables of a policy. Layouts follow TabularCmdp indexing;
/// W and C are prefixed by the constraint index n.
struct ValueTables {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  int num_constraints = 0;
  std::vector<double> v;  // [h][x]
  std::vector<double> q;  // [h][x][a]
  std::vector<double> w;  // [n][h][x]
  std::vector<double> c;  // [n][h][x][a]
  double v1 = 0.0;
  std::vector<double> w1;

  double V(int h, int x) const { return v[static_cast<std::size_t>(h) * num_states + x]; }
  double Q(int h, int x, int a) const {
    return q[(static_cast<std::size_t>(h) * num_states + x) * num_actions + a];
  }
  double W(int n, int h, int x) const {
    return w[(static_cast<std::size_t>(n) * horizon + h) * num_states + x];
  }
  double C(int n, int h, int x, int a) const {
    return c[((static_cast<std::size_t>(n) * horizon + h) * num_states + x) * num_actions + a];
  }
};

/// Just V_1 and W^n_1 of a policy.
struct PolicyValue {
  double value = 0.0;
  std::vector<double> utilities;
};

ValueTables eval_policy_exact(const TabularCmdp& cmdp, const MarkovPolicy& policy);
PolicyValue eval_greedy(const TabularCmdp& cmdp, const GreedyPolicy& policy);

OccupancyMeasure occupancy_of_policy(const TabularCmdp& cmdp, const MarkovPolicy& policy);
OccupancyMeasure occupancy_of_policy(const TabularCmdp& cmdp, const GreedyPolicy& policy);

/// pi_h(a|x) = q_h(x,a) / sum_a q_h(x,a); rows with no mass copy `fallback`.
MarkovPolicy policy_of_occupancy(const OccupancyMeasure& q, const MarkovPolicy& fallback);

/// D_{h,x} = {a : q_h(x,a) > tol}; an empty set becomes {argmax_a q_h(x,a)}.
SupportMap support_of(const OccupancyMeasure& q, double tol);

/// reachable[h*S + x] is true when sum_a q_h(x,a) > kZeroMass.
std::vector<bool> reachable_decisions(const OccupancyMeasure& q);

/// Reachable (h,x) whose row is not one-hot.
int stochastic_decision_count(const MarkovPolicy& policy, const std::vector<bool>& reachable);

/// sum_{h,x,a} q_h(x,a) r_h(x,a) and the same against each utility.
PolicyValue linear_value(const TabularCmdp& cmdp, const OccupancyMeasure& q);

void sample_episode(const TabularCmdp& cmdp, const MarkovPolicy& policy, RngStream& rng,
                    Trajectory& out);
void sample_episode(const TabularCmdp& cmdp, const GreedyPolicy& policy, RngStream& rng,
                    Trajectory& out);
Trajectory sample_episode(const TabularCmdp& cmdp, const MarkovPolicy& policy, RngStream& rng);

/// Draws x' ~ P_h(.|x,a).
int sample_next_state(const TabularCmdp& cmdp, int h, int x, int a, RngStream& rng);

}  // namespace cmdp
