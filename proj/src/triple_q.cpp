#include "cmdp/triple_q.hpp"

#include <algorithm>
#include <cmath>

#include "cmdp/errors.hpp"

namespace cmdp {

TripleQ::TripleQ(const TabularCmdp& cmdp, int total_episodes, SupportMap restriction,
                 const TripleQParams& params)
    : cmdp_(&cmdp), restriction_(std::move(restriction)), params_(params), total_(total_episodes) {
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions();
  if (total_episodes < 1) throw ValidationError("Triple-Q needs at least one episode");
  if (restriction_.horizon() != H || restriction_.num_states() != S || restriction_.num_actions() != A) {
    throw DimensionError("action restriction shape does not match CMDP");
  }
  for (int h = 0; h < H; ++h)
    for (int x = 0; x < S; ++x)
      if (restriction_.actions(h, x).empty()) throw ValidationError("empty action restriction");

  const double T = std::max(2, total_episodes);
  chi_ = params.lr_offset >= 0.0 ? params.lr_offset : H;
  eta_ = params.eta > 0.0 ? params.eta : std::pow(T, 0.2);
  delta_ = params.delta >= 0.0 ? params.delta : params.delta_scale * H / std::pow(T, 0.2);
  iota_ = std::log(static_cast<double>(S) * A * H * T);
  if (params.frame_length > 0) {
    frame_len_ = params.frame_length;
  } else {
    frame_len_ = static_cast<int>(std::ceil(std::pow(T, params.frame_exponent)));
    const int min_frames = std::max(1, params.min_frames);
    if (total_episodes / frame_len_ < min_frames) frame_len_ = std::max(1, total_episodes / min_frames);
  }
  reset();
}

void TripleQ::reset() {
  const int H = cmdp_->horizon(), S = cmdp_->num_states(), N = cmdp_->num_constraints();
  const std::size_t nsa = cmdp_->num_state_actions();
  q_.assign(nsa, 0.0);
  c_.assign(nsa * N, 0.0);
  for (int h = 0; h < H; ++h) {
    const double cap = H - h;
    for (int x = 0; x < S; ++x) {
      for (int a = 0; a < cmdp_->num_actions(); ++a) {
        const std::size_t i = cmdp_->sa_index(h, x, a);
        q_[i] = cap;
        for (int n = 0; n < N; ++n) c_[n * nsa + i] = cap;
      }
    }
  }
  visits_.assign(nsa, 0);
  z_.assign(N, 0.0);
  greedy_.assign(cmdp_->num_decisions(), 0);
  frame_utility_.assign(N, 0.0);
  frame_episodes_ = 0;
  episodes_ = 0;
  refresh_all();
}

double TripleQ::score(int h, int x, int a) const {
  const std::size_t i = cmdp_->sa_index(h, x, a);
  double s = q_[i];
  for (std::size_t n = 0; n < z_.size(); ++n) s += z_[n] / eta_ * c_[n * cmdp_->num_state_actions() + i];
  return s;
}

void TripleQ::refresh_greedy(int h, int x) {
  const auto& allowed = restriction_.actions(h, x);
  int best = allowed.front();
  double best_score = score(h, x, best);
  for (std::size_t k = 1; k < allowed.size(); ++k) {
    const double s = score(h, x, allowed[k]);
    if (s > best_score) {
      best_score = s;
      best = allowed[k];
    }
  }
  greedy_[cmdp_->decision_index(h, x)] = best;
}

void TripleQ::refresh_all() {
  for (int h = 0; h < cmdp_->horizon(); ++h)
    for (int x = 0; x < cmdp_->num_states(); ++x) refresh_greedy(h, x);
}

void TripleQ::episode(RngStream& rng, Trajectory& out, std::vector<int>& used) {
  const int H = cmdp_->horizon(), N = cmdp_->num_constraints();
  const std::size_t nsa = cmdp_->num_state_actions();
  used = greedy_;

  out.states.resize(H);
  out.actions.resize(H);
  out.rewards.resize(H);
  out.utilities.resize(static_cast<std::size_t>(H) * N);
  out.total_reward = 0.0;
  out.total_utilities.assign(N, 0.0);

  int x = cmdp_->initial_state();
  for (int h = 0; h < H; ++h) {
    const int a = used[cmdp_->decision_index(h, x)];
    const double r = cmdp_->reward(h, x, a);
    out.states[h] = x;
    out.actions[h] = a;
    out.rewards[h] = r;
    out.total_reward += r;
    for (int n = 0; n < N; ++n) {
      const double g = cmdp_->utility(n, h, x, a);
      out.utilities[static_cast<std::size_t>(h) * N + n] = g;
      out.total_utilities[n] += g;
    }

    const int next = h + 1 < H ? sample_next_state(*cmdp_, h, x, a, rng) : -1;
    const std::size_t i = cmdp_->sa_index(h, x, a);
    const int t = ++visits_[i];
    const double alpha = (chi_ + 1.0) / (chi_ + t);
    const double bonus = params_.bonus_scale * std::sqrt(static_cast<double>(H) * H * iota_ / t);
    const double cap = H - h;
    double v_next = 0.0;
    int a_next = -1;
    if (next >= 0) {
      a_next = greedy_[cmdp_->decision_index(h + 1, next)];
      v_next = q_[cmdp_->sa_index(h + 1, next, a_next)];
    }
    q_[i] = std::min(cap, (1.0 - alpha) * q_[i] + alpha * (r + v_next + bonus));
    for (int n = 0; n < N; ++n) {
      const double w_next = next >= 0 ? c_[n * nsa + cmdp_->sa_index(h + 1, next, a_next)] : 0.0;
      double& c = c_[n * nsa + i];
      c = std::min(cap, (1.0 - alpha) * c + alpha * (cmdp_->utility(n, h, x, a) + w_next + bonus));
    }
    refresh_greedy(h, x);
    x = next;
  }

  ++episodes_;
  ++frame_episodes_;
  for (int n = 0; n < N; ++n) frame_utility_[n] += out.total_utilities[n];
  if (frame_episodes_ >= frame_len_) end_frame();
}

void TripleQ::end_frame() {
  const int N = cmdp_->num_constraints();
  for (int n = 0; n < N; ++n) {
    const double avg = frame_utility_[n] / frame_episodes_;
    z_[n] = std::max(0.0, z_[n] + params_.queue_step * (cmdp_->threshold(n) + delta_ - avg));
    frame_utility_[n] = 0.0;
  }
  frame_episodes_ = 0;
  if (params_.reset_each_frame) {
    const auto z = z_;
    const int done = episodes_;
    reset();
    z_ = z;
    episodes_ = done;
  }
  refresh_all();
}

GreedyPolicy TripleQ::greedy_policy() const {
  return GreedyPolicy(cmdp_->horizon(), cmdp_->num_states(), cmdp_->num_actions(), greedy_);
}

TqSummary tq_run(const TabularCmdp& cmdp, int K, const SupportMap& restriction,
                 const TripleQParams& params, RngStream& rng, const TqSink& sink) {
  TripleQ learner(cmdp, K, restriction, params);
  TqSummary out;
  out.avg_utilities.assign(cmdp.num_constraints(), 0.0);
  Trajectory traj;
  std::vector<int> used;
  for (int k = 0; k < K; ++k) {
    learner.episode(rng, traj, used);
    if (sink) sink(used, traj);
    out.avg_reward += traj.total_reward;
    for (int n = 0; n < cmdp.num_constraints(); ++n) out.avg_utilities[n] += traj.total_utilities[n];
  }
  out.episodes = K;
  out.avg_reward /= K;
  for (double& u : out.avg_utilities) u /= K;
  return out;
}

}  // namespace cmdp
