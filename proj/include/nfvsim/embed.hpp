#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "nfvsim/mlp.hpp"
#include "nfvsim/substrate.hpp"
#include "nfvsim/workload.hpp"

namespace nfvsim {

struct EmbedParams {
  double r_pts = 10.0;   // reward points per term
  double p_pt = -10.0;   // penalty for a failed placement attempt
  int max_attempts = 0;  // 0 means node count
  double gamma = 0.99;
  double lr = 1e-3;
  double tau = 0.01;
  double eps_start = 1.0;
  double eps_decay = 0.995;  // per episode
  double eps_floor = 0.05;
  int batch_size = 64;
  std::size_t memory_capacity = 50000;
  std::vector<int> hidden = {32, 32};
};

// Node quality: availability ratio scaled by reward points. Availability is
// measured before the current VNF is reserved.
double quality_term(double available, double initialized, double r_pts);

// Fewer attempts give a larger reward: J = (max - attempts + 1) / max.
double placement_term(int attempts, int max_attempts, double r_pts);

// Sum of the four success terms: quality + priority + reliability + placement.
double local_reward_success(double avail_ratio, double priority, double reliability,
                            int attempts, int max_attempts, const EmbedParams& p);

struct VnfTransition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

struct PlacementOutcome {
  bool success = false;
  std::vector<int> assignments;        // substrate node per VNF, -1 if unplaced
  std::vector<PathReservation> paths;  // reserved virtual-link paths
  int total_attempts = 0;              // placement attempts across all VNFs
  double reward_sum = 0.0;
};

// Double deep Q-learner over substrate nodes, with feasibility masking and
// all-or-nothing rollback on failed services.
class DdqlAgent {
 public:
  DdqlAgent(int node_count, int max_vnf_cpu, const EmbedParams& params, std::uint64_t seed);

  // Places VNFs sequentially and routes every virtual link whose endpoints
  // are placed. A failed service leaves the network untouched. When `learn`
  // is set, per-attempt transitions go to the replay buffer.
  PlacementOutcome embed_service(SubstrateNetwork& net, const ServiceRequest& svc, bool learn);

  double train_step(std::span<const VnfTransition> batch);
  std::optional<double> train_from_buffer();
  void end_episode() { epsilon_ = std::max(params_.eps_floor, epsilon_ * params_.eps_decay); }

  std::vector<double> build_state(const SubstrateNetwork& net, const Vnf& vnf,
                                  const ServiceRequest& svc) const;

  double epsilon() const { return epsilon_; }
  void set_epsilon(double e) { epsilon_ = e; }
  std::size_t buffer_size() const { return buffer_.size(); }
  Mlp& online() { return online_; }
  Mlp& target() { return target_; }
  const EmbedParams& params() const { return params_; }
  int max_attempts() const { return params_.max_attempts > 0 ? params_.max_attempts : node_count_; }

 private:
  int node_count_;
  int max_vnf_cpu_;
  EmbedParams params_;
  Mlp online_, target_;
  AdamState adam_;
  std::deque<VnfTransition> buffer_;
  double epsilon_;
  std::mt19937_64 rng_;
};

}  // namespace nfvsim
