#include "nfvsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nfvsim/admission.hpp"
#include "nfvsim/rng.hpp"

namespace nfvsim {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "null"; }

std::vector<double> features_of(const ServiceRequest& s) {
  return {s.qos.delay_ms, s.qos.jitter_ms, s.qos.packet_loss};
}

}  // namespace

std::string to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::Fifo: return "fifo";
    case SchedulerKind::Wfq: return "wfq";
    case SchedulerKind::Priority: return "priority";
    case SchedulerKind::Ddpg: return "ddpg";
  }
  return "?";
}

SchedulerKind scheduler_from_string(const std::string& s) {
  if (s == "fifo") return SchedulerKind::Fifo;
  if (s == "wfq") return SchedulerKind::Wfq;
  if (s == "priority") return SchedulerKind::Priority;
  if (s == "ddpg") return SchedulerKind::Ddpg;
  throw std::invalid_argument("unknown scheduler: " + s);
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  ScenarioConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::istringstream check(line);
      std::string tok;
      if (check >> tok) {
        throw std::runtime_error("bad config line " + std::to_string(lineno) + ": " + line);
      }
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void ScenarioConfig::set(const std::string& key, const std::string& value) {
  auto as_d = [&] { return std::stod(value); };
  auto as_i = [&] { return std::stoi(value); };
  if (key == "topology") topology = value;
  else if (key == "data_dir") data_dir = value;
  else if (key == "scenario") scenario = value;
  else if (key == "episodes") episodes = as_i();
  else if (key == "services") services_per_episode = as_i();
  else if (key == "scheduler") scheduler = scheduler_from_string(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "time_unit") time_unit = as_d();
  else if (key == "audit") audit = value == "true" || value == "1";
  else if (key == "lambda") ridge.lambda = as_d();
  else if (key == "observation_threshold") ridge.observation_threshold = as_i();
  else if (key == "ridge_batch") ridge.batch_size = as_i();
  else if (key == "accuracy_target") ridge.accuracy_target = as_d();
  else if (key == "check_period") ridge.check_period = as_i();
  else if (key == "theta_pts") reward.theta_pts = as_d();
  else if (key == "alpha") reward.alpha = as_d();
  else if (key == "decay_base") reward.decay_base = as_d();
  else if (key == "starving_threshold") reward.starving_threshold = as_d();
  else if (key == "gamma") ddpg.gamma = as_d();
  else if (key == "actor_lr") ddpg.actor_lr = as_d();
  else if (key == "critic_lr") ddpg.critic_lr = as_d();
  else if (key == "tau") ddpg.tau = as_d();
  else if (key == "noise_sigma") ddpg.noise_sigma = as_d();
  else if (key == "noise_decay") ddpg.noise_decay = as_d();
  else if (key == "ddpg_batch") ddpg.batch_size = as_i();
  else if (key == "ddpg_memory") ddpg.memory_capacity = std::stoull(value);
  else if (key == "hidden_layers" || key == "hidden_units") {
    int layers = key == "hidden_layers" ? as_i() : static_cast<int>(ddpg.hidden.size());
    int units = key == "hidden_units" ? as_i() : (ddpg.hidden.empty() ? 32 : ddpg.hidden[0]);
    ddpg.hidden.assign(layers, units);
    embed.hidden.assign(layers, units);
  } else if (key == "r_pts") embed.r_pts = as_d();
  else if (key == "p_pt") embed.p_pt = as_d();
  else if (key == "max_attempts") embed.max_attempts = as_i();
  else if (key == "ddql_gamma") embed.gamma = as_d();
  else if (key == "ddql_lr") embed.lr = as_d();
  else if (key == "ddql_tau") embed.tau = as_d();
  else if (key == "eps_start") embed.eps_start = as_d();
  else if (key == "eps_decay") embed.eps_decay = as_d();
  else if (key == "eps_floor") embed.eps_floor = as_d();
  else if (key == "ddql_batch") embed.batch_size = as_i();
  else if (key == "ddql_memory") embed.memory_capacity = std::stoull(value);
  else throw std::invalid_argument("unknown config key: " + key);
}

std::string ScenarioConfig::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "topology = " << topology << '\n'
      << "data_dir = " << data_dir << '\n'
      << "scenario = " << scenario << '\n'
      << "episodes = " << episodes << '\n'
      << "services = " << services_per_episode << '\n'
      << "scheduler = " << to_string(scheduler) << '\n'
      << "seed = " << seed << '\n'
      << "time_unit = " << time_unit << '\n'
      << "audit = " << (audit ? "true" : "false") << '\n'
      << "lambda = " << ridge.lambda << '\n'
      << "observation_threshold = " << ridge.observation_threshold << '\n'
      << "ridge_batch = " << ridge.batch_size << '\n'
      << "accuracy_target = " << ridge.accuracy_target << '\n'
      << "check_period = " << ridge.check_period << '\n'
      << "theta_pts = " << reward.theta_pts << '\n'
      << "alpha = " << reward.alpha << '\n'
      << "decay_base = " << reward.decay_base << '\n'
      << "starving_threshold = " << reward.starving_threshold << '\n'
      << "gamma = " << ddpg.gamma << '\n'
      << "actor_lr = " << ddpg.actor_lr << '\n'
      << "critic_lr = " << ddpg.critic_lr << '\n'
      << "tau = " << ddpg.tau << '\n'
      << "noise_sigma = " << ddpg.noise_sigma << '\n'
      << "noise_decay = " << ddpg.noise_decay << '\n'
      << "ddpg_batch = " << ddpg.batch_size << '\n'
      << "ddpg_memory = " << ddpg.memory_capacity << '\n'
      << "hidden_layers = " << ddpg.hidden.size() << '\n'
      << "hidden_units = " << (ddpg.hidden.empty() ? 0 : ddpg.hidden[0]) << '\n'
      << "r_pts = " << embed.r_pts << '\n'
      << "p_pt = " << embed.p_pt << '\n'
      << "max_attempts = " << embed.max_attempts << '\n'
      << "ddql_gamma = " << embed.gamma << '\n'
      << "ddql_lr = " << embed.lr << '\n'
      << "ddql_tau = " << embed.tau << '\n'
      << "eps_start = " << embed.eps_start << '\n'
      << "eps_decay = " << embed.eps_decay << '\n'
      << "eps_floor = " << embed.eps_floor << '\n'
      << "ddql_batch = " << embed.batch_size << '\n'
      << "ddql_memory = " << embed.memory_capacity << '\n';
  return out.str();
}

std::string ScenarioConfig::topology_path() const {
  if (topology.size() > 5 && topology.substr(topology.size() - 5) == ".topo") return topology;
  return data_dir + "/" + topology + ".topo";
}

void ScenarioConfig::validate() const {
  if (scenario != "12-4" && scenario != "12-8") {
    throw std::invalid_argument("scenario must be 12-4 or 12-8");
  }
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (services_per_episode < 0 || services_per_episode > 100) {
    throw std::invalid_argument("services per episode must be in [0, 100]");
  }
  if (time_unit <= 0) throw std::invalid_argument("time_unit must be > 0");
  if (reward.theta_pts <= 0) throw std::invalid_argument("theta_pts must be > 0");
  if (reward.decay_base <= 0 || reward.decay_base >= 1) {
    throw std::invalid_argument("decay_base must be in (0, 1)");
  }
  if (ridge.lambda < 0) throw std::invalid_argument("lambda must be >= 0");
}

std::optional<double> EpisodeMetrics::sar() const {
  if (offered == 0) return std::nullopt;
  return static_cast<double>(accepted) / offered;
}

std::optional<double> EpisodeMetrics::sar_low() const {
  if (offered_low == 0) return std::nullopt;
  return static_cast<double>(accepted_low) / offered_low;
}

Experiment::Experiment(const ScenarioConfig& cfg)
    : cfg_(cfg), base_net_(SubstrateNetwork::load(cfg.topology_path())) {
  cfg_.validate();
  cfg_.workload.max_vnf_cpu = cfg_.scenario == "12-8" ? 8 : 4;
  net_ = base_net_;
  ridge_ = std::make_unique<RidgeModel>(cfg_.ridge, make_stream(cfg_.seed, "dypr-init")());
  ddpg_ = std::make_unique<DdpgAgent>(cfg_.ddpg, make_stream(cfg_.seed, "ddpg-noise")());
  ddql_ = std::make_unique<DdqlAgent>(base_net_.node_count(), cfg_.workload.max_vnf_cpu,
                                      cfg_.embed, make_stream(cfg_.seed, "ddql-eps")());
}

std::vector<int> Experiment::order_services(const std::vector<SchedState>& states,
                                            const std::vector<double>& priorities,
                                            std::vector<double>* ranks) {
  switch (cfg_.scheduler) {
    case SchedulerKind::Fifo:
      return fifo_order(static_cast<int>(states.size()));
    case SchedulerKind::Priority:
      return priority_order(priorities);
    case SchedulerKind::Wfq:
      return wfq_order(priorities);
    case SchedulerKind::Ddpg: {
      RankedQueue q = rank_queue(*ddpg_, states, /*explore=*/true);
      if (ranks) *ranks = q.ranks;
      return q.order;
    }
  }
  return {};
}

EpisodeMetrics Experiment::run_episode(int index) {
  EpisodeMetrics m;
  m.episode = index;

  net_ = base_net_;
  net_.reset();

  std::vector<ServiceRequest> batch =
      cfg_.services_per_episode > 0
          ? generate_batch(make_stream(cfg_.seed, "workload", index)(), cfg_.services_per_episode,
                           cfg_.workload)
          : std::vector<ServiceRequest>{};
  const int n = static_cast<int>(batch.size());
  m.offered = n;

  if (n == 0) {
    m.rr_state = ridge_->state() == RidgeState::Observe  ? "observe"
                 : ridge_->state() == RidgeState::Train ? "train"
                                                        : "predict";
    m.rr_accuracy = ridge_->last_accuracy();
    return m;
  }

  // dynamic prioritization
  std::vector<double> priorities(n);
  for (int i = 0; i < n; ++i) {
    priorities[i] = ridge_->ingest(features_of(batch[i]), batch[i].true_priority);
    batch[i].assigned_priority = priorities[i];
  }

  // scheduling states; n(T) is batch-local min-max
  double t_lo = batch[0].threshold_wait, t_hi = batch[0].threshold_wait;
  for (const auto& s : batch) {
    t_lo = std::min(t_lo, s.threshold_wait);
    t_hi = std::max(t_hi, s.threshold_wait);
  }
  std::vector<SchedState> states(n);
  for (int i = 0; i < n; ++i) {
    states[i].t_norm = t_hi > t_lo ? (batch[i].threshold_wait - t_lo) / (t_hi - t_lo) : 0.5;
    states[i].reliability = batch[i].reliability;
    states[i].priority = priorities[i];
  }

  std::vector<double> ranks(n, 0.0);
  std::vector<int> order = order_services(states, priorities, &ranks);
  std::vector<int> pos_of(n, 0);
  for (int k = 0; k < n; ++k) pos_of[order[k]] = k;

  for (int i = 0; i < n; ++i) {
    PriorityLabel label = make_priority_label(priorities[i]);
    ++m.offered_macro[label.macro_class];
    if (priorities[i] <= cfg_.reward.starving_threshold) ++m.offered_low;
    if (priorities[i] > 0.8) ++m.offered_high;
  }

  // sequential admission + embedding in queue order
  WaitMatrix waits;
  double wait_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    int i = order[k];
    const ServiceRequest& svc = batch[i];
    double waited = waits.total_wait(k);
    wait_sum += waited;
    double duration = 0.0;
    if (admit(waited, svc.threshold_wait)) {
      PlacementOutcome out = ddql_->embed_service(net_, svc, /*learn=*/true);
      duration = out.total_attempts * cfg_.time_unit;
      if (out.success) {
        ++m.accepted;
        ++m.accepted_macro[make_priority_label(priorities[i]).macro_class];
        if (priorities[i] <= cfg_.reward.starving_threshold) ++m.accepted_low;
        if (priorities[i] > 0.8) ++m.accepted_high;
      } else {
        ++m.embed_rejects;
      }
      ddql_->train_from_buffer();
    } else {
      ++m.timeouts;
    }
    waits.record_deployment(k, duration);
  }
  m.mean_wait = wait_sum / n;
  m.durations = waits.durations();

  // rewards use the final queue positions
  double reward_sum = 0.0;
  for (int i = 0; i < n; ++i) reward_sum += reward(states[i], pos_of[i], cfg_.reward);
  m.mean_reward = reward_sum / n;

  if (cfg_.scheduler == SchedulerKind::Ddpg) {
    for (int i = 0; i < n; ++i) {
      SchedTransition t;
      t.state = states[i];
      t.action = ranks[i];
      t.reward = reward(states[i], pos_of[i], cfg_.reward);
      t.next_state = i + 1 < n ? states[i + 1] : SchedState{};
      t.done = i + 1 == n;
      ddpg_->remember(t);
    }
    for (int i = 0; i < n; ++i) ddpg_->train_from_buffer();
    ddpg_->end_episode();
  }
  ddql_->end_episode();

  m.rr_state = ridge_->state() == RidgeState::Observe  ? "observe"
               : ridge_->state() == RidgeState::Train ? "train"
                                                      : "predict";
  m.rr_accuracy = ridge_->last_accuracy();
  return m;
}

std::vector<EpisodeMetrics> Experiment::run_all() {
  std::vector<EpisodeMetrics> all;
  all.reserve(cfg_.episodes);
  for (int e = 0; e < cfg_.episodes; ++e) all.push_back(run_episode(e));
  return all;
}

std::optional<double> WindowSummary::sar() const {
  if (offered == 0) return std::nullopt;
  return static_cast<double>(accepted) / offered;
}

std::optional<double> WindowSummary::sar_low() const {
  if (offered_low == 0) return std::nullopt;
  return static_cast<double>(accepted_low) / offered_low;
}

WindowSummary summarize_window(const std::vector<EpisodeMetrics>& metrics, int window) {
  WindowSummary w;
  int start = std::max(0, static_cast<int>(metrics.size()) - window);
  for (std::size_t i = start; i < metrics.size(); ++i) {
    w.offered += metrics[i].offered;
    w.accepted += metrics[i].accepted;
    w.offered_low += metrics[i].offered_low;
    w.accepted_low += metrics[i].accepted_low;
    w.offered_high += metrics[i].offered_high;
    w.accepted_high += metrics[i].accepted_high;
  }
  return w;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "label,sar,sar_low,sar_low_ratio_vs_first\n";
  std::optional<double> base =
      rows.empty() ? std::nullopt : rows.front().window.sar_low();
  for (const auto& r : rows) {
    out << r.label << ',' << fmt_opt(r.window.sar()) << ',' << fmt_opt(r.window.sar_low()) << ',';
    auto own = r.window.sar_low();
    if (base && *base > 0 && own) out << fmt(*own / *base);
    else out << "null";
    out << '\n';
  }
  return out.str();
}

void write_metrics_csv(const std::string& path, const std::vector<EpisodeMetrics>& metrics,
                       const ScenarioConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "episode,scheduler,offered,accepted,accepted_low,offered_low,sar,sar_low,"
         "timeouts,rr_state,rr_accuracy,mean_reward\n";
  for (const auto& m : metrics) {
    out << m.episode << ',' << to_string(cfg.scheduler) << ',' << m.offered << ',' << m.accepted
        << ',' << m.accepted_low << ',' << m.offered_low << ',' << fmt_opt(m.sar()) << ','
        << fmt_opt(m.sar_low()) << ',' << m.timeouts << ',' << m.rr_state << ','
        << fmt(m.rr_accuracy) << ',' << fmt(m.mean_reward) << '\n';
  }
}

void write_manifest(const std::string& path, const ScenarioConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << cfg.serialize();
}

std::vector<EpisodeMetrics> run_experiment(const ScenarioConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  Experiment exp(cfg);
  std::vector<EpisodeMetrics> metrics = exp.run_all();
  write_metrics_csv(out_dir + "/metrics.csv", metrics, cfg);
  write_manifest(out_dir + "/manifest.txt", cfg);
  WindowSummary w = summarize_window(metrics, std::max(1, cfg.episodes / 10));
  std::ofstream sum(out_dir + "/summary.txt", std::ios::binary);
  sum << summary_table({{to_string(cfg.scheduler), w}});
  if (cfg.audit) {
    std::ofstream waits(out_dir + "/waits.txt", std::ios::binary);
    for (const auto& m : metrics) {
      waits << m.episode;
      for (double d : m.durations) waits << ' ' << fmt(d);
      waits << '\n';
    }
  }
  return metrics;
}

}  // namespace nfvsim
