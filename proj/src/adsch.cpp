#include "nfvsim/adsch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nfvsim/dypr.hpp"

namespace nfvsim {

double beneficial_cost(const SchedState& s, double theta_pts) {
  return (1.0 - s.t_norm) * theta_pts + s.reliability * theta_pts + s.priority * theta_pts;
}

int starving_flag(double priority, double threshold) {
  return priority <= threshold ? 1 : 0;
}

double starvation_cost(double priority, int queue_position, const RewardParams& p) {
  if (queue_position < 0) throw std::invalid_argument("queue position must be >= 0");
  if (!starving_flag(priority, p.starving_threshold)) return 0.0;
  return p.alpha * std::pow(p.decay_base, queue_position) * p.theta_pts;
}

double reward(const SchedState& s, int queue_position, const RewardParams& p) {
  return beneficial_cost(s, p.theta_pts) + starvation_cost(s.priority, queue_position, p);
}

DdpgAgent::DdpgAgent(const DdpgConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), noise_sigma_(cfg.noise_sigma), rng_(seed) {
  std::vector<int> actor_sizes{3};
  std::vector<int> critic_sizes{4};  // state triple + action
  for (int h : cfg_.hidden) {
    actor_sizes.push_back(h);
    critic_sizes.push_back(h);
  }
  actor_sizes.push_back(1);
  critic_sizes.push_back(1);
  actor_ = Mlp(actor_sizes, OutputActivation::Sigmoid, rng_);
  critic_ = Mlp(critic_sizes, OutputActivation::Identity, rng_);
  target_actor_.copy_from(actor_);
  target_critic_.copy_from(critic_);
  actor_adam_ = AdamState(actor_);
  critic_adam_ = AdamState(critic_);
}

double DdpgAgent::rank(const SchedState& s, bool explore) {
  double a = actor_.forward({s.t_norm, s.reliability, s.priority})[0];
  if (explore) {
    std::normal_distribution<double> noise(0.0, noise_sigma_);
    a += noise(rng_);
  }
  return std::clamp(a, 0.0, 1.0);
}

void DdpgAgent::remember(const SchedTransition& t) {
  buffer_.push_back(t);
  while (buffer_.size() > cfg_.memory_capacity) buffer_.pop_front();
}

std::pair<double, double> DdpgAgent::train_step(std::span<const SchedTransition> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  const double n = static_cast<double>(batch.size());

  // critic: squared TD error against the frozen targets
  critic_.zero_grad();
  double critic_loss = 0.0;
  for (const auto& t : batch) {
    std::vector<double> next_in{t.next_state.t_norm, t.next_state.reliability,
                                t.next_state.priority};
    double a_next = target_actor_.forward(next_in)[0];
    next_in.push_back(a_next);
    double q_next = target_critic_.forward(next_in)[0];
    double target = t.reward + cfg_.gamma * q_next * (t.done ? 0.0 : 1.0);
    double q = critic_.forward_train(
        {t.state.t_norm, t.state.reliability, t.state.priority, t.action})[0];
    double err = q - target;
    critic_loss += err * err;
    critic_.backward({2.0 * err / n});
  }
  critic_loss /= n;
  if (!std::isfinite(critic_loss)) throw std::runtime_error("non-finite critic loss");
  adam_step(critic_, critic_adam_, cfg_.critic_lr);

  // actor: ascend Q(s, mu(s)); critic grads from this pass are discarded
  actor_.zero_grad();
  critic_.zero_grad();
  double actor_objective = 0.0;
  for (const auto& t : batch) {
    std::vector<double> s{t.state.t_norm, t.state.reliability, t.state.priority};
    double a = actor_.forward_train(s)[0];
    std::vector<double> sa = s;
    sa.push_back(a);
    double q = critic_.forward_train(sa)[0];
    actor_objective += q;
    std::vector<double> in_grad = critic_.backward({-1.0 / n});
    actor_.backward({in_grad[3]});
  }
  actor_objective /= n;
  if (!std::isfinite(actor_objective)) throw std::runtime_error("non-finite actor objective");
  adam_step(actor_, actor_adam_, cfg_.actor_lr);
  critic_.zero_grad();

  target_actor_.soft_update_from(actor_, cfg_.tau);
  target_critic_.soft_update_from(critic_, cfg_.tau);
  return {critic_loss, actor_objective};
}

std::optional<std::pair<double, double>> DdpgAgent::train_from_buffer() {
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return std::nullopt;
  std::vector<SchedTransition> batch;
  batch.reserve(cfg_.batch_size);
  std::uniform_int_distribution<std::size_t> pick(0, buffer_.size() - 1);
  for (int i = 0; i < cfg_.batch_size; ++i) batch.push_back(buffer_[pick(rng_)]);
  return train_step(batch);
}

RankedQueue rank_queue(DdpgAgent& agent, const std::vector<SchedState>& services, bool explore) {
  RankedQueue q;
  q.ranks.reserve(services.size());
  for (const auto& s : services) q.ranks.push_back(agent.rank(s, explore));
  q.order.resize(services.size());
  std::iota(q.order.begin(), q.order.end(), 0);
  std::stable_sort(q.order.begin(), q.order.end(),
                   [&](int a, int b) { return q.ranks[a] > q.ranks[b]; });
  return q;
}

std::vector<int> fifo_order(int count) {
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

std::vector<int> priority_order(const std::vector<double>& priorities) {
  std::vector<int> order(priorities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return priorities[a] > priorities[b]; });
  return order;
}

std::vector<int> wfq_order(const std::vector<double>& priorities) {
  // FIFO queue per macro class, drained round-robin with quantum
  // (macro + 1) per cycle, highest class first.
  std::vector<std::vector<int>> classes(10);
  for (std::size_t i = 0; i < priorities.size(); ++i) {
    classes[make_priority_label(priorities[i]).macro_class].push_back(static_cast<int>(i));
  }
  std::vector<std::size_t> next(10, 0);
  std::vector<int> order;
  order.reserve(priorities.size());
  while (order.size() < priorities.size()) {
    for (int c = 9; c >= 0; --c) {
      int quantum = c + 1;
      for (int k = 0; k < quantum && next[c] < classes[c].size(); ++k) {
        order.push_back(classes[c][next[c]++]);
      }
    }
  }
  return order;
}

}  // namespace nfvsim
