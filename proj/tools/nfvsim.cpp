#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nfvsim/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"NFV resource-allocation simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one seeded experiment");
  std::string config_path, out_dir;
  run->add_option("--config", config_path, "config file (key = value lines)");
  run->add_option("--out", out_dir, "output directory")->required();
  std::string scheduler, topology, scenario;
  long long seed = -1;
  int episodes = -1, services = -1;
  bool audit = false;
  run->add_option("--seed", seed, "root RNG seed");
  run->add_option("--scheduler", scheduler, "fifo | wfq | priority | ddpg");
  run->add_option("--episodes", episodes, "episode count");
  run->add_option("--services", services, "services per episode (max 100)");
  run->add_option("--topology", topology, "topology name or .topo path");
  run->add_option("--scenario", scenario, "12-4 | 12-8");
  std::string data_dir;
  run->add_option("--data-dir", data_dir, "directory with .topo files");
  run->add_flag("--audit", audit, "dump wait matrices per episode");

  CLI11_PARSE(app, argc, argv);

  try {
    nfvsim::ScenarioConfig cfg =
        config_path.empty() ? nfvsim::ScenarioConfig{} : nfvsim::ScenarioConfig::from_file(config_path);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!scheduler.empty()) cfg.scheduler = nfvsim::scheduler_from_string(scheduler);
    if (episodes > 0) cfg.episodes = episodes;
    if (services >= 0) cfg.services_per_episode = services;
    if (!topology.empty()) cfg.topology = topology;
    if (!scenario.empty()) cfg.scenario = scenario;
    if (!data_dir.empty()) cfg.data_dir = data_dir;
    if (audit) cfg.audit = true;
    cfg.validate();

    auto metrics = nfvsim::run_experiment(cfg, out_dir);
    nfvsim::WindowSummary w =
        nfvsim::summarize_window(metrics, std::max(1, cfg.episodes / 10));
    std::cout << nfvsim::summary_table({{nfvsim::to_string(cfg.scheduler), w}});
    std::cout << "wrote " << out_dir << "/metrics.csv (" << metrics.size() << " episodes)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
