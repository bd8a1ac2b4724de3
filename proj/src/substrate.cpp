#include "nfvsim/substrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace nfvsim {

namespace {

constexpr double kRamPerCore = 4.0;  // GB per CPU core

double parse_kv(const std::string& tok, const std::string& k, int lineno) {
  if (tok.rfind(k + "=", 0) != 0) {
    throw std::runtime_error("topology parse error at line " + std::to_string(lineno) +
                             ": expected '" + k + "=<value>', got '" + tok + "'");
  }
  return std::stod(tok.substr(k.size() + 1));
}

}  // namespace

SubstrateNetwork SubstrateNetwork::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  if (dot != std::string::npos) base = base.substr(0, dot);
  return parse(buf.str(), base);
}

SubstrateNetwork SubstrateNetwork::parse(const std::string& text, const std::string& name) {
  SubstrateNetwork net;
  net.name = name;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "node") {
      int id;
      std::string cpu_tok;
      if (!(ls >> id >> cpu_tok)) {
        throw std::runtime_error("topology parse error at line " + std::to_string(lineno));
      }
      int cpu = static_cast<int>(parse_kv(cpu_tok, "cpu", lineno));
      if (cpu < 0) throw std::runtime_error("negative cpu capacity at line " + std::to_string(lineno));
      if (id != static_cast<int>(net.nodes_.size())) {
        throw std::runtime_error("node ids must be consecutive from 0 (line " +
                                 std::to_string(lineno) + ")");
      }
      NodeResources n;
      n.cpu = n.cpu_init = cpu;
      n.ram = n.ram_init = kRamPerCore * cpu;
      net.nodes_.push_back(n);
    } else if (kind == "link") {
      int id, src, dst;
      std::string bw_tok, lat_tok;
      if (!(ls >> id >> src >> dst >> bw_tok >> lat_tok)) {
        throw std::runtime_error("topology parse error at line " + std::to_string(lineno));
      }
      double bw = parse_kv(bw_tok, "bw", lineno);
      double lat = parse_kv(lat_tok, "lat", lineno);
      if (bw < 0 || lat < 0) {
        throw std::runtime_error("negative link capacity at line " + std::to_string(lineno));
      }
      if (src < 0 || dst < 0 || src >= static_cast<int>(net.nodes_.size()) ||
          dst >= static_cast<int>(net.nodes_.size()) || src == dst) {
        throw std::runtime_error("bad link endpoints at line " + std::to_string(lineno));
      }
      LinkResources l;
      l.bandwidth = l.bandwidth_init = bw;
      l.latency = lat;
      if (!net.links_.emplace(key(src, dst), l).second) {
        throw std::runtime_error("duplicate link at line " + std::to_string(lineno));
      }
    } else {
      throw std::runtime_error("unknown record '" + kind + "' at line " + std::to_string(lineno));
    }
  }
  if (net.nodes_.size() < 2 || net.links_.empty()) {
    throw std::runtime_error("trivial topology: need at least 2 nodes and 1 link");
  }
  net.adj_.assign(net.nodes_.size(), {});
  for (const auto& [k, l] : net.links_) {
    net.adj_[k.first].push_back(k.second);
    net.adj_[k.second].push_back(k.first);
  }
  // connectivity (BFS from node 0)
  std::vector<char> seen(net.nodes_.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : net.adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw std::runtime_error("topology is disconnected");
  }
  return net;
}

const NodeResources& SubstrateNetwork::node(int id) const {
  if (id < 0 || id >= node_count()) throw std::out_of_range("bad node id");
  return nodes_[id];
}

const LinkResources& SubstrateNetwork::link(int a, int b) const {
  auto it = links_.find(key(a, b));
  if (it == links_.end()) throw std::out_of_range("no such link");
  return it->second;
}

LinkResources& SubstrateNetwork::link_mut(int a, int b) {
  auto it = links_.find(key(a, b));
  if (it == links_.end()) throw std::out_of_range("no such link");
  return it->second;
}

bool SubstrateNetwork::reserve_node(int id, const NodeDemand& demand) {
  if (id < 0 || id >= node_count()) throw std::out_of_range("bad node id");
  NodeResources& n = nodes_[id];
  if (demand.cpu < 0 || demand.ram < 0) throw std::invalid_argument("negative demand");
  if (n.cpu < demand.cpu || n.ram < demand.ram) return false;
  n.cpu -= demand.cpu;
  n.ram -= demand.ram;
  return true;
}

void SubstrateNetwork::release_node(int id, const NodeDemand& demand) {
  if (id < 0 || id >= node_count()) throw std::out_of_range("bad node id");
  NodeResources& n = nodes_[id];
  if (n.cpu + demand.cpu > n.cpu_init || n.ram + demand.ram > n.ram_init + 1e-9) {
    throw std::logic_error("release exceeds initialized capacity on node " + std::to_string(id));
  }
  n.cpu += demand.cpu;
  n.ram += demand.ram;
}

std::optional<PathReservation> SubstrateNetwork::reserve_path(int src, int dst, double bandwidth,
                                                              double latency_budget) {
  if (src < 0 || dst < 0 || src >= node_count() || dst >= node_count()) {
    throw std::out_of_range("bad path endpoints");
  }
  if (src == dst) return PathReservation{};
  // Dijkstra on latency over links with enough free bandwidth.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodes_.size(), inf);
  std::vector<int> prev(nodes_.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == dst) break;
    for (int v : adj_[u]) {
      const LinkResources& l = link(u, v);
      if (l.bandwidth < bandwidth) continue;
      double nd = d + l.latency;
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        pq.emplace(nd, v);
      }
    }
  }
  if (dist[dst] > latency_budget) return std::nullopt;
  PathReservation r;
  r.bandwidth = bandwidth;
  r.latency = dist[dst];
  for (int v = dst; v != -1; v = prev[v]) r.nodes.push_back(v);
  std::reverse(r.nodes.begin(), r.nodes.end());
  for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) {
    link_mut(r.nodes[i], r.nodes[i + 1]).bandwidth -= bandwidth;
  }
  return r;
}

void SubstrateNetwork::release_path(const PathReservation& r) {
  for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) {
    LinkResources& l = link_mut(r.nodes[i], r.nodes[i + 1]);
    if (l.bandwidth + r.bandwidth > l.bandwidth_init + 1e-9) {
      throw std::logic_error("path release exceeds initialized bandwidth");
    }
    l.bandwidth += r.bandwidth;
  }
}

void SubstrateNetwork::reset() {
  for (auto& n : nodes_) {
    n.cpu = n.cpu_init;
    n.ram = n.ram_init;
  }
  for (auto& [k, l] : links_) l.bandwidth = l.bandwidth_init;
}

}  // namespace nfvsim
