#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "nfvsim/mlp.hpp"

namespace nfvsim {

// Scheduling state triple: normalized threshold waiting time, reliability
// and assigned priority, each in [0,1].
struct SchedState {
  double t_norm = 0.0;
  double reliability = 0.0;
  double priority = 0.0;
};

struct RewardParams {
  double theta_pts = 10.0;
  double alpha = 1.0;
  double decay_base = 0.1;          // the literal (1-eps) = 0.1; 0.9 also supported
  double starving_threshold = 0.2;
};

// (1 - n(T)) * theta + Gamma * theta + P * theta
double beneficial_cost(const SchedState& s, double theta_pts);

// 1 when priority <= threshold (boundary inclusive), else 0.
int starving_flag(double priority, double threshold = 0.2);

// Z * alpha * base^kappa * theta, kappa = queue position from the front.
double starvation_cost(double priority, int queue_position, const RewardParams& p);

double reward(const SchedState& s, int queue_position, const RewardParams& p);

struct SchedTransition {
  SchedState state;
  double action = 0.0;
  double reward = 0.0;
  SchedState next_state;
  bool done = false;
};

struct DdpgConfig {
  double gamma = 0.99;
  double actor_lr = 1e-4;   // Alpha
  double critic_lr = 1e-3;  // Beta
  double tau = 0.001;
  double noise_sigma = 0.1;
  double noise_decay = 0.999;  // per episode
  int batch_size = 64;
  std::size_t memory_capacity = 50000;
  std::vector<int> hidden = {32, 32};  // published scale is 6 x 300
};

class DdpgAgent {
 public:
  DdpgAgent(const DdpgConfig& cfg, std::uint64_t seed);

  // actor(state), plus clipped Gaussian noise when exploring
  double rank(const SchedState& s, bool explore);

  void remember(const SchedTransition& t);
  // One update on an explicit batch; returns (critic_loss, actor_objective).
  std::pair<double, double> train_step(std::span<const SchedTransition> batch);
  // Samples batch_size transitions from the buffer; no-op while the buffer
  // is short.
  std::optional<std::pair<double, double>> train_from_buffer();
  void end_episode() { noise_sigma_ *= cfg_.noise_decay; }

  std::size_t buffer_size() const { return buffer_.size(); }
  const std::deque<SchedTransition>& buffer() const { return buffer_; }
  double noise_sigma() const { return noise_sigma_; }
  const DdpgConfig& config() const { return cfg_; }

  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  Mlp& target_actor() { return target_actor_; }
  Mlp& target_critic() { return target_critic_; }
  void set_tau(double tau) { cfg_.tau = tau; }

 private:
  DdpgConfig cfg_;
  Mlp actor_, critic_, target_actor_, target_critic_;
  AdamState actor_adam_, critic_adam_;
  std::deque<SchedTransition> buffer_;
  double noise_sigma_;
  std::mt19937_64 rng_;
};

struct RankedQueue {
  std::vector<int> order;     // arrival indices, front first
  std::vector<double> ranks;  // indexed by arrival position
};

// Ranks every service with the actor and sorts descending by rank; ties
// keep arrival order.
RankedQueue rank_queue(DdpgAgent& agent, const std::vector<SchedState>& services, bool explore);

// Baseline orderings. All return arrival indices, front first.
std::vector<int> fifo_order(int count);
std::vector<int> priority_order(const std::vector<double>& priorities);
// Weighted round-robin over macro-priority classes, class weight macro+1.
std::vector<int> wfq_order(const std::vector<double>& priorities);

}  // namespace nfvsim
