#include "nfvsim/embed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfvsim {

double quality_term(double available, double initialized, double r_pts) {
  if (initialized <= 0) throw std::invalid_argument("initialized capacity must be > 0");
  if (available < 0 || available > initialized) {
    throw std::invalid_argument("availability out of [0, initialized]");
  }
  return available / initialized * r_pts;
}

double placement_term(int attempts, int max_attempts, double r_pts) {
  if (attempts < 1 || attempts > max_attempts) {
    throw std::invalid_argument("attempts out of [1, max_attempts]");
  }
  double j = static_cast<double>(max_attempts - attempts + 1) / max_attempts;
  return j * r_pts;
}

double local_reward_success(double avail_ratio, double priority, double reliability,
                            int attempts, int max_attempts, const EmbedParams& p) {
  return quality_term(avail_ratio, 1.0, p.r_pts) + priority * p.r_pts +
         reliability * p.r_pts + placement_term(attempts, max_attempts, p.r_pts);
}

DdqlAgent::DdqlAgent(int node_count, int max_vnf_cpu, const EmbedParams& params,
                     std::uint64_t seed)
    : node_count_(node_count),
      max_vnf_cpu_(max_vnf_cpu),
      params_(params),
      epsilon_(params.eps_start),
      rng_(seed) {
  // state: vnf demand (cpu, ram) + per-node (cpu ratio, ram ratio) + (P, Gamma)
  int input = 2 + 2 * node_count + 2;
  std::vector<int> sizes{input};
  for (int h : params_.hidden) sizes.push_back(h);
  sizes.push_back(node_count);
  online_ = Mlp(sizes, OutputActivation::Identity, rng_);
  target_.copy_from(online_);
  adam_ = AdamState(online_);
}

std::vector<double> DdqlAgent::build_state(const SubstrateNetwork& net, const Vnf& vnf,
                                           const ServiceRequest& svc) const {
  std::vector<double> s;
  s.reserve(4 + 2 * node_count_);
  s.push_back(static_cast<double>(vnf.cpu) / max_vnf_cpu_);
  s.push_back(vnf.ram / (4.0 * max_vnf_cpu_));
  for (int y = 0; y < node_count_; ++y) {
    const NodeResources& n = net.node(y);
    s.push_back(n.cpu_init > 0 ? static_cast<double>(n.cpu) / n.cpu_init : 0.0);
    s.push_back(n.ram_init > 0 ? n.ram / n.ram_init : 0.0);
  }
  s.push_back(std::clamp(svc.assigned_priority, 0.0, 1.0));
  s.push_back(svc.reliability);
  return s;
}

PlacementOutcome DdqlAgent::embed_service(SubstrateNetwork& net, const ServiceRequest& svc,
                                          bool learn) {
  PlacementOutcome out;
  out.assignments.assign(svc.vnfs.size(), -1);
  const int limit = max_attempts();

  struct NodeReservation {
    int node;
    NodeDemand demand;
  };
  std::vector<NodeReservation> reserved_nodes;
  std::vector<PathReservation> reserved_paths;

  auto rollback = [&] {
    for (auto it = reserved_paths.rbegin(); it != reserved_paths.rend(); ++it) {
      net.release_path(*it);
    }
    for (auto it = reserved_nodes.rbegin(); it != reserved_nodes.rend(); ++it) {
      net.release_node(it->node, it->demand);
    }
  };

  std::vector<VnfTransition> trace;
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  for (std::size_t x = 0; x < svc.vnfs.size(); ++x) {
    const Vnf& vnf = svc.vnfs[x];
    NodeDemand demand{vnf.cpu, vnf.ram};
    std::vector<char> tried(node_count_, 0);
    bool placed = false;
    int attempts = 0;

    while (attempts < limit) {
      std::vector<double> state = build_state(net, vnf, svc);
      std::vector<int> feasible;
      for (int y = 0; y < node_count_; ++y) {
        if (tried[y]) continue;
        const NodeResources& n = net.node(y);
        if (n.cpu >= demand.cpu && n.ram >= demand.ram) feasible.push_back(y);
      }
      if (feasible.empty()) break;

      int y;
      if (u01(rng_) < epsilon_) {
        std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
        y = feasible[pick(rng_)];
      } else {
        std::vector<double> q = online_.forward(state);
        y = feasible[0];
        for (int cand : feasible) {
          if (q[cand] > q[y]) y = cand;
        }
      }
      ++attempts;
      ++out.total_attempts;

      const NodeResources& before = net.node(y);
      double avail_ratio =
          0.5 * (static_cast<double>(before.cpu) / before.cpu_init + before.ram / before.ram_init);
      if (!net.reserve_node(y, demand)) {
        throw std::logic_error("feasibility mask admitted an infeasible node");
      }

      // Route every virtual link whose other endpoint is already placed.
      std::vector<PathReservation> step_paths;
      bool routed = true;
      for (const auto& vl : svc.vlinks) {
        int other = -1;
        if (vl.dst_vnf == static_cast<int>(x)) other = vl.src_vnf;
        else if (vl.src_vnf == static_cast<int>(x)) other = vl.dst_vnf;
        else continue;
        if (other >= static_cast<int>(x) || out.assignments[other] < 0) continue;
        auto path = net.reserve_path(out.assignments[other], y, vl.bandwidth, vl.latency_budget);
        if (!path) {
          routed = false;
          break;
        }
        step_paths.push_back(std::move(*path));
      }

      if (!routed) {
        for (auto it = step_paths.rbegin(); it != step_paths.rend(); ++it) net.release_path(*it);
        net.release_node(y, demand);
        tried[y] = 1;
        if (learn) trace.push_back({state, y, params_.p_pt, state, false});
        out.reward_sum += params_.p_pt;
        continue;
      }

      // success for this VNF
      out.assignments[x] = y;
      reserved_nodes.push_back({y, demand});
      for (auto& p : step_paths) {
        reserved_paths.push_back(p);
        out.paths.push_back(std::move(p));
      }
      double r = local_reward_success(avail_ratio, std::clamp(svc.assigned_priority, 0.0, 1.0),
                                      svc.reliability, attempts, limit, params_);
      out.reward_sum += r;
      if (learn) {
        bool last = x + 1 == svc.vnfs.size();
        std::vector<double> next_state =
            last ? std::vector<double>(state.size(), 0.0)
                 : build_state(net, svc.vnfs[x + 1], svc);
        trace.push_back({std::move(state), y, r, std::move(next_state), last});
      }
      placed = true;
      break;
    }

    if (!placed) {
      rollback();
      out.success = false;
      out.assignments.assign(svc.vnfs.size(), -1);
      out.paths.clear();
      if (learn && !trace.empty()) trace.back().done = true;
      for (auto& t : trace) {
        buffer_.push_back(std::move(t));
        while (buffer_.size() > params_.memory_capacity) buffer_.pop_front();
      }
      return out;
    }
  }

  out.success = true;
  for (auto& t : trace) {
    buffer_.push_back(std::move(t));
    while (buffer_.size() > params_.memory_capacity) buffer_.pop_front();
  }
  return out;
}

double DdqlAgent::train_step(std::span<const VnfTransition> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  const double n = static_cast<double>(batch.size());
  online_.zero_grad();
  double loss = 0.0;
  for (const auto& t : batch) {
    // double-Q target: online picks the action, target evaluates it
    double target_v = t.reward;
    if (!t.done) {
      std::vector<double> q_online_next = online_.forward(t.next_state);
      int best = 0;
      for (int a = 1; a < node_count_; ++a) {
        if (q_online_next[a] > q_online_next[best]) best = a;
      }
      double q_next = target_.forward(t.next_state)[best];
      target_v += params_.gamma * q_next;
    }
    std::vector<double> q = online_.forward_train(t.state);
    double err = q[t.action] - target_v;
    loss += err * err;
    std::vector<double> out_grad(node_count_, 0.0);
    out_grad[t.action] = 2.0 * err / n;
    online_.backward(out_grad);
  }
  loss /= n;
  if (!std::isfinite(loss)) throw std::runtime_error("non-finite DDQL loss");
  adam_step(online_, adam_, params_.lr);
  target_.soft_update_from(online_, params_.tau);
  return loss;
}

std::optional<double> DdqlAgent::train_from_buffer() {
  if (buffer_.size() < static_cast<std::size_t>(params_.batch_size)) return std::nullopt;
  std::vector<VnfTransition> batch;
  batch.reserve(params_.batch_size);
  std::uniform_int_distribution<std::size_t> pick(0, buffer_.size() - 1);
  for (int i = 0; i < params_.batch_size; ++i) batch.push_back(buffer_[pick(rng_)]);
  return train_step(batch);
}

}  // namespace nfvsim
