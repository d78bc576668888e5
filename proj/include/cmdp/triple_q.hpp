#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cmdp/core.hpp"
#include "cmdp/rng.hpp"

namespace cmdp {

/// Negative "auto" values are resolved against the run length T at construction.
struct TripleQParams {
  double bonus_scale = 0.05;     // c_b in c_b * sqrt(H^2 log(SAHT) / t)
  double lr_offset = -1.0;       // chi in alpha_t = (chi+1)/(chi+t); auto = H
  double eta = -1.0;             // dual scaling; auto = T^0.2
  double delta = -1.0;           // utility slack; auto = delta_scale * H / T^0.2
  double delta_scale = 0.05;
  double queue_step = 1.0;
  double frame_exponent = 0.6;   // frame length ~ T^frame_exponent
  int frame_length = 1;          // > 0 overrides the exponent rule
  int min_frames = 4;
  bool reset_each_frame = false; // reset Q, C and counts at every frame boundary
};

/// Optimistic primal-dual Q-learning with virtual queues. Each episode follows
/// one greedy table: argmax over allowed a of Q + sum_n (Z_n/eta) C^n,
/// ties to the lowest action index.
class TripleQ {
 public:
  /// total_episodes sets T for the auto hyperparameters and the frame length.
  TripleQ(const TabularCmdp& cmdp, int total_episodes, SupportMap restriction,
          const TripleQParams& params = {});

  /// Back to the freshly constructed state.
  void reset();

  /// Plays one episode; `used` receives the greedy table that generated it.
  void episode(RngStream& rng, Trajectory& out, std::vector<int>& used);

  /// Greedy table the next episode will follow, indexed [h*S + x].
  std::span<const int> greedy_actions() const { return greedy_; }
  GreedyPolicy greedy_policy() const;

  std::span<const double> queues() const { return z_; }
  int episodes_done() const { return episodes_; }
  int frame_length() const { return frame_len_; }
  double eta() const { return eta_; }
  double delta() const { return delta_; }
  const SupportMap& restriction() const { return restriction_; }

 private:
  double score(int h, int x, int a) const;
  void refresh_greedy(int h, int x);
  void refresh_all();
  void end_frame();

  const TabularCmdp* cmdp_;
  SupportMap restriction_;
  TripleQParams params_;
  int total_;
  int frame_len_ = 1;
  double eta_ = 1.0, delta_ = 0.0, chi_ = 1.0, iota_ = 1.0;

  std::vector<double> q_;       // [h][x][a]
  std::vector<double> c_;       // [n][h][x][a]
  std::vector<int> visits_;     // [h][x][a]
  std::vector<double> z_;       // [n]
  std::vector<int> greedy_;     // [h][x]
  std::vector<double> frame_utility_;
  int frame_episodes_ = 0;
  int episodes_ = 0;
};

struct TqSummary {
  double avg_reward = 0.0;
  std::vector<double> avg_utilities;
  int episodes = 0;
};

/// Called once per episode with the greedy table used and the trajectory.
using TqSink = std::function<void(std::span<const int> policy, const Trajectory& trajectory)>;

/// Fresh learner for K episodes; returns realized averages.
TqSummary tq_run(const TabularCmdp& cmdp, int K, const SupportMap& restriction,
                 const TripleQParams& params, RngStream& rng, const TqSink& sink = {});

}  // namespace cmdp
