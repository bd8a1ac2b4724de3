#include "nfvsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nfvsim {

namespace {

// Hidden coefficients of the ground-truth priority map.
constexpr double kWDelay = 0.5;
constexpr double kWJitter = 0.3;
constexpr double kWPloss = 0.2;
constexpr double kBias = 0.0;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

double true_priority_oracle(const QosTolerances& qos, double noise, const WorkloadConfig& cfg) {
  if (qos.delay_ms <= 0 || qos.jitter_ms <= 0 || qos.packet_loss <= 0) {
    throw std::invalid_argument("tolerances must be positive");
  }
  // Normalized urgency of each tolerance: 1 at the tightest end of the
  // range, 0 at the loosest.
  double xd = (cfg.delay_max - qos.delay_ms) / (cfg.delay_max - cfg.delay_min);
  double xj = (cfg.jitter_max - qos.jitter_ms) / (cfg.jitter_max - cfg.jitter_min);
  double xp = (cfg.ploss_max - qos.packet_loss) / (cfg.ploss_max - cfg.ploss_min);
  return clamp01(kWDelay * xd + kWJitter * xj + kWPloss * xp + kBias + noise);
}

std::vector<ServiceRequest> generate_batch(std::uint64_t seed, int count,
                                           const WorkloadConfig& cfg) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_vnfs_d(cfg.min_vnfs, cfg.max_vnfs);
  std::uniform_int_distribution<int> cpu_d(1, cfg.max_vnf_cpu);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> delay_d(cfg.delay_min, cfg.delay_max);
  std::uniform_real_distribution<double> jitter_d(cfg.jitter_min, cfg.jitter_max);
  std::uniform_real_distribution<double> ploss_d(cfg.ploss_min, cfg.ploss_max);
  std::uniform_real_distribution<double> rel_d(cfg.rel_min, cfg.rel_max);
  std::uniform_real_distribution<double> twt_d(cfg.twt_min, cfg.twt_max);
  std::uniform_real_distribution<double> short_twt_d(cfg.twt_min, cfg.short_twt_max);
  std::uniform_real_distribution<double> bw_d(cfg.bw_min, cfg.bw_max);
  std::uniform_real_distribution<double> vlat_d(cfg.vlink_lat_min, cfg.vlink_lat_max);
  std::normal_distribution<double> noise_d(0.0, cfg.priority_noise);

  std::vector<ServiceRequest> batch;
  batch.reserve(count);
  for (int id = 0; id < count; ++id) {
    ServiceRequest s;
    s.id = id;
    int n = n_vnfs_d(rng);
    s.vnfs.resize(n);
    for (auto& v : s.vnfs) {
      v.cpu = cpu_d(rng);
      v.ram = 4.0 * v.cpu;
    }
    // Chain backbone keeps the SFC connected by construction; extra
    // forward edges are drawn Erdos-Renyi.
    for (int i = 0; i + 1 < n; ++i) {
      s.vlinks.push_back({i, i + 1, bw_d(rng), vlat_d(rng)});
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (u01(rng) < cfg.edge_prob) {
          s.vlinks.push_back({i, j, bw_d(rng), vlat_d(rng)});
        }
      }
    }
    s.qos.delay_ms = delay_d(rng);
    s.qos.jitter_ms = jitter_d(rng);
    s.qos.packet_loss = ploss_d(rng);
    s.reliability = rel_d(rng);
    s.threshold_wait = u01(rng) < cfg.short_twt_frac ? short_twt_d(rng) : twt_d(rng);
    s.true_priority = true_priority_oracle(s.qos, noise_d(rng), cfg);
    batch.push_back(std::move(s));
  }
  return batch;
}

void export_batch(const std::vector<ServiceRequest>& batch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out.precision(17);
  for (const auto& s : batch) {
    out << "svc " << s.id << ' ' << s.qos.delay_ms << ' ' << s.qos.jitter_ms << ' '
        << s.qos.packet_loss << ' ' << s.reliability << ' ' << s.threshold_wait << ' '
        << s.true_priority << '\n';
    for (const auto& v : s.vnfs) out << "vnf " << v.cpu << ' ' << v.ram << '\n';
    for (const auto& l : s.vlinks) {
      out << "vlink " << l.src_vnf << ' ' << l.dst_vnf << ' ' << l.bandwidth << ' '
          << l.latency_budget << '\n';
    }
  }
}

std::vector<ServiceRequest> import_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  std::vector<ServiceRequest> batch;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "svc") {
      ServiceRequest s;
      if (!(ls >> s.id >> s.qos.delay_ms >> s.qos.jitter_ms >> s.qos.packet_loss >>
            s.reliability >> s.threshold_wait >> s.true_priority)) {
        throw std::runtime_error("bad svc record at line " + std::to_string(lineno));
      }
      batch.push_back(std::move(s));
    } else if (kind == "vnf") {
      if (batch.empty()) throw std::runtime_error("vnf before svc at line " + std::to_string(lineno));
      Vnf v;
      if (!(ls >> v.cpu >> v.ram)) {
        throw std::runtime_error("bad vnf record at line " + std::to_string(lineno));
      }
      batch.back().vnfs.push_back(v);
    } else if (kind == "vlink") {
      if (batch.empty()) throw std::runtime_error("vlink before svc at line " + std::to_string(lineno));
      VirtualLink l;
      if (!(ls >> l.src_vnf >> l.dst_vnf >> l.bandwidth >> l.latency_budget)) {
        throw std::runtime_error("bad vlink record at line " + std::to_string(lineno));
      }
      batch.back().vlinks.push_back(l);
    } else {
      throw std::runtime_error("unknown record '" + kind + "' at line " + std::to_string(lineno));
    }
  }
  return batch;
}

}  // namespace nfvsim
