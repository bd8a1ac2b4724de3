#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nfvsim {

// Per-node resources. RAM is derived from the CPU core count at load time
// (4 GB per core), so the two dimensions stay correlated.
struct NodeResources {
  int cpu = 0;
  double ram = 0.0;
  int cpu_init = 0;
  double ram_init = 0.0;

  bool operator==(const NodeResources&) const = default;
};

struct LinkResources {
  double bandwidth = 0.0;  // Mbps available
  double latency = 0.0;    // ms, constant per link
  double bandwidth_init = 0.0;

  bool operator==(const LinkResources&) const = default;
};

struct NodeDemand {
  int cpu = 0;
  double ram = 0.0;
};

// A reserved latency-shortest path. Empty node list means colocated
// endpoints: zero latency, nothing reserved.
struct PathReservation {
  std::vector<int> nodes;
  double bandwidth = 0.0;
  double latency = 0.0;
};

class SubstrateNetwork {
 public:
  // Line-oriented format:
  //   node <id> cpu=<int>
  //   link <id> <src> <dst> bw=<float> lat=<float>
  // '#' starts a comment. Throws on parse failure, negative capacity or a
  // disconnected/trivial graph.
  static SubstrateNetwork load(const std::string& path);
  static SubstrateNetwork parse(const std::string& text, const std::string& name);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }
  const NodeResources& node(int id) const;
  const LinkResources& link(int a, int b) const;
  const std::vector<int>& neighbors(int id) const { return adj_.at(id); }

  // All dimensions are checked before any is decremented; failure leaves
  // the node untouched.
  bool reserve_node(int id, const NodeDemand& demand);
  // Inverse of reserve_node. Throws if the release would push an available
  // above its initialized capacity.
  void release_node(int id, const NodeDemand& demand);

  // Latency-shortest path from src to dst over links with at least
  // `bandwidth` available; fails (no mutation) when no path fits the
  // latency budget. src == dst yields an empty zero-cost reservation.
  std::optional<PathReservation> reserve_path(int src, int dst, double bandwidth,
                                              double latency_budget);
  void release_path(const PathReservation& r);

  void reset();  // availables back to initialized capacities

  bool operator==(const SubstrateNetwork&) const = default;

  std::string name;

 private:
  LinkResources& link_mut(int a, int b);
  static std::pair<int, int> key(int a, int b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }

  std::vector<NodeResources> nodes_;
  std::map<std::pair<int, int>, LinkResources> links_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace nfvsim
