#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nfvsim {

struct Vnf {
  int cpu = 1;
  double ram = 4.0;  // 4 GB per requested core, same rule as the substrate
};

struct VirtualLink {
  int src_vnf = 0;
  int dst_vnf = 0;
  double bandwidth = 0.0;      // Mbps
  double latency_budget = 0.0; // ms
};

struct QosTolerances {
  double delay_ms = 0.0;
  double jitter_ms = 0.0;
  double packet_loss = 0.0;  // fraction
};

struct ServiceRequest {
  int id = 0;
  std::vector<Vnf> vnfs;
  std::vector<VirtualLink> vlinks;
  QosTolerances qos;
  double reliability = 1.0;          // Gamma, in [0,1]
  double threshold_wait = 0.0;       // TWT, time units
  double true_priority = 0.0;        // hidden ground truth, never shown to schedulers
  double assigned_priority = -1.0;   // set by the prioritizer
};

struct WorkloadConfig {
  int min_vnfs = 2;
  int max_vnfs = 6;
  int max_vnf_cpu = 4;       // 4 for the 12-4 scenario, 8 for 12-8
  double edge_prob = 0.4;    // extra Erdos-Renyi edges over the chain backbone

  // attribute ranges
  double delay_min = 5.0, delay_max = 100.0;
  double jitter_min = 1.0, jitter_max = 20.0;
  double ploss_min = 0.001, ploss_max = 0.05;
  double rel_min = 0.5, rel_max = 1.0;
  double twt_min = 2.0, twt_max = 30.0;
  double short_twt_frac = 0.30;  // mass of tight deadlines, drawn from U[2,6]
  double short_twt_max = 6.0;

  double bw_min = 10.0, bw_max = 100.0;          // vlink demand
  double vlink_lat_min = 5.0, vlink_lat_max = 25.0;

  double priority_noise = 0.02;  // sigma of the label noise
};

// Hidden affine map from tolerances to ground-truth priority. Tighter
// tolerances give higher priority; `noise` is the realized label noise.
double true_priority_oracle(const QosTolerances& qos, double noise,
                            const WorkloadConfig& cfg = {});

// Deterministic under a fixed seed. Every SFC is a connected directed graph
// over 2..6 VNFs: chain backbone plus extra random edges.
std::vector<ServiceRequest> generate_batch(std::uint64_t seed, int count,
                                           const WorkloadConfig& cfg = {});

// Line-delimited replay format.
void export_batch(const std::vector<ServiceRequest>& batch, const std::string& path);
std::vector<ServiceRequest> import_batch(const std::string& path);

}  // namespace nfvsim
