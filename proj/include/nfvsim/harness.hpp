#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nfvsim/adsch.hpp"
#include "nfvsim/dypr.hpp"
#include "nfvsim/embed.hpp"
#include "nfvsim/substrate.hpp"
#include "nfvsim/workload.hpp"

namespace nfvsim {

enum class SchedulerKind { Fifo, Wfq, Priority, Ddpg };

std::string to_string(SchedulerKind k);
SchedulerKind scheduler_from_string(const std::string& s);

struct ScenarioConfig {
  std::string topology = "netrail";  // name resolved under data_dir, or a .topo path
  std::string data_dir = "data";
  std::string scenario = "12-4";  // per-VNF cpu demand in {1..4} or {1..8}
  int episodes = 200;
  int services_per_episode = 50;
  SchedulerKind scheduler = SchedulerKind::Fifo;
  std::uint64_t seed = 1;
  double time_unit = 1.0;  // time per embedding attempt
  bool audit = false;      // dump wait matrices and placement logs

  RidgeConfig ridge;
  RewardParams reward;
  DdpgConfig ddpg;
  EmbedParams embed;
  WorkloadConfig workload;

  // key = value lines, '#' comments
  static ScenarioConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  std::string serialize() const;
  std::string topology_path() const;
  void validate() const;
};

struct EpisodeMetrics {
  int episode = 0;
  int offered = 0;
  int accepted = 0;
  int offered_low = 0;   // assigned priority <= 0.2
  int accepted_low = 0;
  int offered_high = 0;  // assigned priority > 0.8
  int accepted_high = 0;
  int timeouts = 0;      // admission rejections
  int embed_rejects = 0;
  std::array<int, 10> offered_macro{};
  std::array<int, 10> accepted_macro{};
  double mean_wait = 0.0;
  double mean_reward = 0.0;
  std::string rr_state;
  double rr_accuracy = 0.0;
  std::vector<double> durations;  // audit: deployment durations in queue order

  std::optional<double> sar() const;
  std::optional<double> sar_low() const;
};

// One seeded run: agents persist across episodes, the substrate resets
// every episode.
class Experiment {
 public:
  explicit Experiment(const ScenarioConfig& cfg);

  EpisodeMetrics run_episode(int index);
  std::vector<EpisodeMetrics> run_all();

  const ScenarioConfig& config() const { return cfg_; }
  RidgeModel& prioritizer() { return *ridge_; }
  DdqlAgent& embedder() { return *ddql_; }
  DdpgAgent& scheduler_agent() { return *ddpg_; }
  const SubstrateNetwork& network() const { return base_net_; }

 private:
  std::vector<int> order_services(const std::vector<SchedState>& states,
                                  const std::vector<double>& priorities,
                                  std::vector<double>* ranks);

  ScenarioConfig cfg_;
  SubstrateNetwork base_net_;
  SubstrateNetwork net_;
  std::unique_ptr<RidgeModel> ridge_;
  std::unique_ptr<DdpgAgent> ddpg_;
  std::unique_ptr<DdqlAgent> ddql_;
};

// Aggregate SARs over the last `window` episodes, from summed counters.
struct WindowSummary {
  int offered = 0, accepted = 0, offered_low = 0, accepted_low = 0;
  int offered_high = 0, accepted_high = 0;
  std::optional<double> sar() const;
  std::optional<double> sar_low() const;
};
WindowSummary summarize_window(const std::vector<EpisodeMetrics>& metrics, int window);

struct SummaryRow {
  std::string label;
  WindowSummary window;
};
// Per-stream SAR table plus low-priority SAR ratios against the first row.
std::string summary_table(const std::vector<SummaryRow>& rows);

void write_metrics_csv(const std::string& path, const std::vector<EpisodeMetrics>& metrics,
                       const ScenarioConfig& cfg);
void write_manifest(const std::string& path, const ScenarioConfig& cfg);

// Runs the experiment and writes metrics.csv, manifest.txt and summary.txt
// (plus audit files when enabled) into out_dir. Returns the metrics.
std::vector<EpisodeMetrics> run_experiment(const ScenarioConfig& cfg, const std::string& out_dir);

}  // namespace nfvsim
