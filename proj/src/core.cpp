#include "cmdp/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cmdp/errors.hpp"

namespace cmdp {

namespace {

std::string loc(int h, int x, int a) {
  std::ostringstream os;
  os << "(h=" << h << ", x=" << x << ", a=" << a << ")";
  return os.str();
}

void require_shape(int h, int s, int a, const TabularCmdp& cmdp, const char* what) {
  if (h != cmdp.horizon() || s != cmdp.num_states() || a != cmdp.num_actions()) {
    std::ostringstream os;
    os << what << " shape (" << h << "," << s << "," << a << ") does not match CMDP ("
       << cmdp.horizon() << "," << cmdp.num_states() << "," << cmdp.num_actions() << ")";
    throw DimensionError(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// TabularCmdp

TabularCmdp::TabularCmdp(CmdpTables tables) : t_(std::move(tables)) {
  const int H = t_.horizon, S = t_.num_states, A = t_.num_actions, N = t_.num_constraints;
  if (H <= 0 || S <= 0 || A <= 0 || N < 0) {
    throw ValidationError("CMDP sizes must be positive (H, S, A) and N >= 0");
  }
  if (t_.initial_state < 0 || t_.initial_state >= S) {
    throw ValidationError("initial state out of range");
  }
  const std::size_t nsa = num_state_actions();
  if (t_.transitions.size() != nsa * S) throw DimensionError("transition table has wrong size");
  if (t_.rewards.size() != nsa) throw DimensionError("reward table has wrong size");
  if (t_.utilities.size() != nsa * N) throw DimensionError("utility table has wrong size");
  if (t_.thresholds.size() != static_cast<std::size_t>(N)) {
    throw DimensionError("threshold vector has wrong size");
  }

  succ_begin_.reserve(nsa + 1);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      for (int a = 0; a < A; ++a) {
        const std::size_t base = sa_index(h, x, a) * S;
        double sum = 0.0;
        succ_begin_.push_back(succ_.size());
        for (int y = 0; y < S; ++y) {
          const double p = t_.transitions[base + y];
          if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ValidationError("negative or non-finite transition probability at " + loc(h, x, a));
          }
          sum += p;
          if (p > 0.0) succ_.push_back({y, p});
        }
        if (std::abs(sum - 1.0) > kIdentityTol) {
          std::ostringstream os;
          os << "transition row " << loc(h, x, a) << " sums to " << sum;
          throw ValidationError(os.str());
        }
        const double r = t_.rewards[sa_index(h, x, a)];
        if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("reward outside [0,1] at " + loc(h, x, a));
        for (int n = 0; n < N; ++n) {
          const double g = utility(n, h, x, a);
          if (!(g >= 0.0 && g <= 1.0)) {
            throw ValidationError("utility " + std::to_string(n) + " outside [0,1] at " + loc(h, x, a));
          }
        }
      }
    }
  }
  succ_begin_.push_back(succ_.size());
  for (int n = 0; n < N; ++n) {
    const double rho = t_.thresholds[n];
    if (!(rho >= 0.0 && rho <= H)) {
      throw ValidationError("threshold " + std::to_string(n) + " outside [0,H]");
    }
  }
}

std::span<const Transition> TabularCmdp::successors(int h, int x, int a) const {
  const std::size_t i = sa_index(h, x, a);
  return {succ_.data() + succ_begin_[i], succ_begin_[i + 1] - succ_begin_[i]};
}

// ---------------------------------------------------------------------------
// SupportMap

SupportMap::SupportMap(int horizon, int num_states, int num_actions)
    : horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      sets_(static_cast<std::size_t>(horizon) * num_states, std::vector<int>{0}) {}

SupportMap SupportMap::full(int horizon, int num_states, int num_actions) {
  SupportMap m(horizon, num_states, num_actions);
  std::vector<int> all(num_actions);
  for (int a = 0; a < num_actions; ++a) all[a] = a;
  for (auto& s : m.sets_) s = all;
  return m;
}

void SupportMap::set(int h, int x, std::vector<int> actions) {
  if (actions.empty()) throw ValidationError("support set must be nonempty");
  std::sort(actions.begin(), actions.end());
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
  if (actions.front() < 0 || actions.back() >= num_actions_) {
    throw ValidationError("support action out of range");
  }
  sets_[index(h, x)] = std::move(actions);
}

bool SupportMap::contains(int h, int x, int a) const {
  const auto& s = sets_[index(h, x)];
  return std::binary_search(s.begin(), s.end(), a);
}

int SupportMap::multi_action_count() const {
  return static_cast<int>(
      std::count_if(sets_.begin(), sets_.end(), [](const auto& s) { return s.size() > 1; }));
}

// ---------------------------------------------------------------------------
// Policies

GreedyPolicy::GreedyPolicy(int horizon, int num_states, int num_actions, std::vector<int> actions)
    : horizon_(horizon), num_states_(num_states), num_actions_(num_actions), actions_(std::move(actions)) {
  if (actions_.size() != static_cast<std::size_t>(horizon) * num_states) {
    throw DimensionError("greedy policy has wrong number of decisions");
  }
  for (int a : actions_) {
    if (a < 0 || a >= num_actions) throw ValidationError("greedy action out of range");
  }
}

MarkovPolicy::MarkovPolicy(int horizon, int num_states, int num_actions, std::vector<double> probs)
    : horizon_(horizon), num_states_(num_states), num_actions_(num_actions), probs_(std::move(probs)) {
  if (probs_.size() != static_cast<std::size_t>(horizon) * num_states * num_actions) {
    throw DimensionError("policy table has wrong size");
  }
  for (int h = 0; h < horizon; ++h) {
    for (int x = 0; x < num_states; ++x) {
      double sum = 0.0;
      for (int a = 0; a < num_actions; ++a) {
        const double p = prob(h, x, a);
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw ValidationError("negative policy entry at " + loc(h, x, a));
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kIdentityTol) {
        std::ostringstream os;
        os << "policy row (h=" << h << ", x=" << x << ") sums to " << sum;
        throw ValidationError(os.str());
      }
    }
  }
}

MarkovPolicy MarkovPolicy::uniform(int horizon, int num_states, int num_actions) {
  return MarkovPolicy(horizon, num_states, num_actions,
                      std::vector<double>(static_cast<std::size_t>(horizon) * num_states * num_actions,
                                          1.0 / num_actions));
}

MarkovPolicy MarkovPolicy::from_greedy(const GreedyPolicy& greedy) {
  const int H = greedy.horizon(), S = greedy.num_states(), A = greedy.num_actions();
  std::vector<double> p(static_cast<std::size_t>(H) * S * A, 0.0);
  for (int h = 0; h < H; ++h)
    for (int x = 0; x < S; ++x) p[(static_cast<std::size_t>(h) * S + x) * A + greedy.action(h, x)] = 1.0;
  return MarkovPolicy(H, S, A, std::move(p));
}

MarkovPolicy MarkovPolicy::uniform_over(const SupportMap& support) {
  const int H = support.horizon(), S = support.num_states(), A = support.num_actions();
  std::vector<double> p(static_cast<std::size_t>(H) * S * A, 0.0);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      const auto& set = support.actions(h, x);
      for (int a : set) p[(static_cast<std::size_t>(h) * S + x) * A + a] = 1.0 / set.size();
    }
  }
  return MarkovPolicy(H, S, A, std::move(p));
}

bool MarkovPolicy::is_greedy_at(int h, int x) const {
  int ones = 0;
  for (double p : row(h, x)) {
    if (std::abs(p - 1.0) <= kIdentityTol) ++ones;
  }
  return ones == 1;
}

bool MarkovPolicy::is_greedy() const {
  for (int h = 0; h < horizon_; ++h)
    for (int x = 0; x < num_states_; ++x)
      if (!is_greedy_at(h, x)) return false;
  return true;
}

int MarkovPolicy::argmax_action(int h, int x) const {
  const auto r = row(h, x);
  return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
}

// ---------------------------------------------------------------------------
// OccupancyMeasure

OccupancyMeasure::OccupancyMeasure(int horizon, int num_states, int num_actions, std::vector<double> mass)
    : horizon_(horizon), num_states_(num_states), num_actions_(num_actions), mass_(std::move(mass)) {
  if (mass_.size() != static_cast<std::size_t>(horizon) * num_states * num_actions) {
    throw DimensionError("occupancy table has wrong size");
  }
}

double OccupancyMeasure::state_mass(int h, int x) const {
  double s = 0.0;
  for (int a = 0; a < num_actions_; ++a) s += mass(h, x, a);
  return s;
}

double OccupancyMeasure::max_invariant_violation(const TabularCmdp& cmdp) const {
  require_shape(horizon_, num_states_, num_actions_, cmdp, "occupancy");
  const int H = horizon_, S = num_states_, A = num_actions_;
  double worst = 0.0;
  for (double v : mass_) worst = std::max(worst, -v);
  for (int x = 0; x < S; ++x) {
    const double target = x == cmdp.initial_state() ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(state_mass(0, x) - target));
  }
  std::vector<double> inflow(S);
  for (int h = 0; h + 1 < H; ++h) {
    std::fill(inflow.begin(), inflow.end(), 0.0);
    for (int x = 0; x < S; ++x)
      for (int a = 0; a < A; ++a)
        for (const auto& t : cmdp.successors(h, x, a)) inflow[t.next] += t.prob * mass(h, x, a);
    for (int x = 0; x < S; ++x) worst = std::max(worst, std::abs(state_mass(h + 1, x) - inflow[x]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Evaluation

ValueTables eval_policy_exact(const TabularCmdp& cmdp, const MarkovPolicy& policy) {
  require_shape(policy.horizon(), policy.num_states(), policy.num_actions(), cmdp, "policy");
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions(), N = cmdp.num_constraints();
  ValueTables vt;
  vt.horizon = H;
  vt.num_states = S;
  vt.num_actions = A;
  vt.num_constraints = N;
  vt.v.assign(static_cast<std::size_t>(H) * S, 0.0);
  vt.q.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  vt.w.assign(static_cast<std::size_t>(N) * H * S, 0.0);
  vt.c.assign(static_cast<std::size_t>(N) * H * S * A, 0.0);

  const std::size_t hs = static_cast<std::size_t>(H) * S;
  const std::size_t hsa = hs * A;
  for (int h = H - 1; h >= 0; --h) {
    for (int x = 0; x < S; ++x) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        const std::size_t i = cmdp.sa_index(h, x, a);
        double q = cmdp.reward(h, x, a);
        if (h + 1 < H) {
          for (const auto& t : cmdp.successors(h, x, a)) q += t.prob * vt.v[(h + 1) * S + t.next];
        }
        vt.q[i] = q;
        v += policy.prob(h, x, a) * q;
      }
      vt.v[h * S + x] = v;
      for (int n = 0; n < N; ++n) {
        double w = 0.0;
        for (int a = 0; a < A; ++a) {
          const std::size_t i = cmdp.sa_index(h, x, a);
          double c = cmdp.utility(n, h, x, a);
          if (h + 1 < H) {
            for (const auto& t : cmdp.successors(h, x, a)) c += t.prob * vt.w[n * hs + (h + 1) * S + t.next];
          }
          vt.c[n * hsa + i] = c;
          w += policy.prob(h, x, a) * c;
        }
        vt.w[n * hs + h * S + x] = w;
      }
    }
  }
  vt.v1 = vt.v[cmdp.initial_state()];
  vt.w1.resize(N);
  for (int n = 0; n < N; ++n) vt.w1[n] = vt.w[n * hs + cmdp.initial_state()];
  return vt;
}

PolicyValue eval_greedy(const TabularCmdp& cmdp, const GreedyPolicy& policy) {
  require_shape(policy.horizon(), policy.num_states(), policy.num_actions(), cmdp, "policy");
  const int H = cmdp.horizon(), S = cmdp.num_states(), N = cmdp.num_constraints();
  // Rows: [0] reward, [1..N] utilities.
  std::vector<double> next(static_cast<std::size_t>(N + 1) * S, 0.0), cur(next.size(), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int x = 0; x < S; ++x) {
      const int a = policy.action(h, x);
      double v = cmdp.reward(h, x, a);
      for (const auto& t : cmdp.successors(h, x, a)) v += h + 1 < H ? t.prob * next[t.next] : 0.0;
      cur[x] = v;
      for (int n = 0; n < N; ++n) {
        double w = cmdp.utility(n, h, x, a);
        if (h + 1 < H) {
          for (const auto& t : cmdp.successors(h, x, a)) w += t.prob * next[(n + 1) * S + t.next];
        }
        cur[(n + 1) * S + x] = w;
      }
    }
    std::swap(cur, next);
  }
  PolicyValue out;
  out.value = next[cmdp.initial_state()];
  out.utilities.resize(N);
  for (int n = 0; n < N; ++n) out.utilities[n] = next[(n + 1) * S + cmdp.initial_state()];
  return out;
}

namespace {

template <class ProbFn>
OccupancyMeasure forward_occupancy(const TabularCmdp& cmdp, ProbFn&& pi) {
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions();
  std::vector<double> q(cmdp.num_state_actions(), 0.0);
  std::vector<double> state(S, 0.0), next(S, 0.0);
  state[cmdp.initial_state()] = 1.0;
  for (int h = 0; h < H; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int x = 0; x < S; ++x) {
      if (state[x] == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        const double m = state[x] * pi(h, x, a);
        if (m == 0.0) continue;
        q[cmdp.sa_index(h, x, a)] = m;
        if (h + 1 < H)
          for (const auto& t : cmdp.successors(h, x, a)) next[t.next] += t.prob * m;
      }
    }
    std::swap(state, next);
  }
  return OccupancyMeasure(H, S, A, std::move(q));
}

}  // namespace

OccupancyMeasure occupancy_of_policy(const TabularCmdp& cmdp, const MarkovPolicy& policy) {
  require_shape(policy.horizon(), policy.num_states(), policy.num_actions(), cmdp, "policy");
  return forward_occupancy(cmdp, [&](int h, int x, int a) { return policy.prob(h, x, a); });
}

OccupancyMeasure occupancy_of_policy(const TabularCmdp& cmdp, const GreedyPolicy& policy) {
  require_shape(policy.horizon(), policy.num_states(), policy.num_actions(), cmdp, "policy");
  return forward_occupancy(cmdp,
                           [&](int h, int x, int a) { return policy.action(h, x) == a ? 1.0 : 0.0; });
}

MarkovPolicy policy_of_occupancy(const OccupancyMeasure& q, const MarkovPolicy& fallback) {
  const int H = q.horizon(), S = q.num_states(), A = q.num_actions();
  if (fallback.horizon() != H || fallback.num_states() != S || fallback.num_actions() != A) {
    throw DimensionError("fallback policy shape does not match occupancy measure");
  }
  std::vector<double> p(static_cast<std::size_t>(H) * S * A, 0.0);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      double total = 0.0;
      for (int a = 0; a < A; ++a) {
        const double m = q.mass(h, x, a);
        if (m < -kIdentityTol) {
          throw ValidationError("negative occupancy mass at " + loc(h, x, a));
        }
        total += std::max(m, 0.0);
      }
      const std::size_t base = (static_cast<std::size_t>(h) * S + x) * A;
      if (total > kZeroMass) {
        for (int a = 0; a < A; ++a) p[base + a] = std::max(q.mass(h, x, a), 0.0) / total;
      } else {
        for (int a = 0; a < A; ++a) p[base + a] = fallback.prob(h, x, a);
      }
    }
  }
  return MarkovPolicy(H, S, A, std::move(p));
}

SupportMap support_of(const OccupancyMeasure& q, double tol) {
  if (tol < 0.0) throw ValidationError("support tolerance must be nonnegative");
  const int H = q.horizon(), S = q.num_states(), A = q.num_actions();
  SupportMap support(H, S, A);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      std::vector<int> set;
      int best = 0;
      for (int a = 0; a < A; ++a) {
        if (q.mass(h, x, a) > tol) set.push_back(a);
        if (q.mass(h, x, a) > q.mass(h, x, best)) best = a;
      }
      if (set.empty()) set.push_back(best);
      support.set(h, x, std::move(set));
    }
  }
  return support;
}

std::vector<bool> reachable_decisions(const OccupancyMeasure& q) {
  std::vector<bool> out(static_cast<std::size_t>(q.horizon()) * q.num_states());
  for (int h = 0; h < q.horizon(); ++h)
    for (int x = 0; x < q.num_states(); ++x)
      out[static_cast<std::size_t>(h) * q.num_states() + x] = q.state_mass(h, x) > kZeroMass;
  return out;
}

int stochastic_decision_count(const MarkovPolicy& policy, const std::vector<bool>& reachable) {
  int count = 0;
  for (int h = 0; h < policy.horizon(); ++h) {
    for (int x = 0; x < policy.num_states(); ++x) {
      const std::size_t i = static_cast<std::size_t>(h) * policy.num_states() + x;
      if (i < reachable.size() && reachable[i] && !policy.is_greedy_at(h, x)) ++count;
    }
  }
  return count;
}

PolicyValue linear_value(const TabularCmdp& cmdp, const OccupancyMeasure& q) {
  require_shape(q.horizon(), q.num_states(), q.num_actions(), cmdp, "occupancy");
  const int N = cmdp.num_constraints();
  PolicyValue out;
  out.utilities.assign(N, 0.0);
  for (int h = 0; h < cmdp.horizon(); ++h) {
    for (int x = 0; x < cmdp.num_states(); ++x) {
      for (int a = 0; a < cmdp.num_actions(); ++a) {
        const double m = q.mass(h, x, a);
        out.value += m * cmdp.reward(h, x, a);
        for (int n = 0; n < N; ++n) out.utilities[n] += m * cmdp.utility(n, h, x, a);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

int sample_next_state(const TabularCmdp& cmdp, int h, int x, int a, RngStream& rng) {
  const auto succ = cmdp.successors(h, x, a);
  if (succ.size() == 1) return succ.front().next;
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& t : succ) {
    acc += t.prob;
    if (u < acc) return t.next;
  }
  return succ.back().next;
}

namespace {

void reset_trajectory(const TabularCmdp& cmdp, Trajectory& out) {
  const int H = cmdp.horizon(), N = cmdp.num_constraints();
  out.states.resize(H);
  out.actions.resize(H);
  out.rewards.resize(H);
  out.utilities.resize(static_cast<std::size_t>(H) * N);
  out.total_reward = 0.0;
  out.total_utilities.assign(N, 0.0);
}

template <class ActionFn>
void run_episode(const TabularCmdp& cmdp, ActionFn&& choose, RngStream& rng, Trajectory& out) {
  reset_trajectory(cmdp, out);
  const int H = cmdp.horizon(), N = cmdp.num_constraints();
  int x = cmdp.initial_state();
  for (int h = 0; h < H; ++h) {
    const int a = choose(h, x);
    out.states[h] = x;
    out.actions[h] = a;
    const double r = cmdp.reward(h, x, a);
    out.rewards[h] = r;
    out.total_reward += r;
    for (int n = 0; n < N; ++n) {
      const double g = cmdp.utility(n, h, x, a);
      out.utilities[static_cast<std::size_t>(h) * N + n] = g;
      out.total_utilities[n] += g;
    }
    if (h + 1 < H) x = sample_next_state(cmdp, h, x, a, rng);
  }
}

}  // namespace

void sample_episode(const TabularCmdp& cmdp, const MarkovPolicy& policy, RngStream& rng,
                    Trajectory& out) {
  require_shape(policy.horizon(), policy.num_states(), policy.num_actions(), cmdp, "policy");
  run_episode(cmdp, [&](int h, int x) { return rng.categorical(policy.row(h, x)); }, rng, out);
}

void sample_episode(const TabularCmdp& cmdp, const GreedyPolicy& policy, RngStream& rng,
                    Trajectory& out) {
  require_shape(policy.horizon(), policy.num_states(), policy.num_actions(), cmdp, "policy");
  run_episode(cmdp, [&](int h, int x) { return policy.action(h, x); }, rng, out);
}

Trajectory sample_episode(const TabularCmdp& cmdp, const MarkovPolicy& policy, RngStream& rng) {
  Trajectory t;
  sample_episode(cmdp, policy, rng, t);
  return t;
}

}  // namespace cmdp
