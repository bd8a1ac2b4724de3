#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nfvsim/harness.hpp"

using namespace nfvsim;

namespace {

ScenarioConfig small_config(SchedulerKind sched, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.topology = "netrail";
  cfg.data_dir = "data";
  cfg.episodes = 3;
  cfg.services_per_episode = 20;
  cfg.scheduler = sched;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("scheduler names round-trip") {
  for (auto k : {SchedulerKind::Fifo, SchedulerKind::Wfq, SchedulerKind::Priority,
                 SchedulerKind::Ddpg}) {
    CHECK(scheduler_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(scheduler_from_string("lifo"), std::invalid_argument);
}

TEST_CASE("config file parse, serialize and re-parse agree") {
  std::string path = "/tmp/nfvsim_cfg_test.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "topology = bteurope\n"
        << "scenario = 12-8   # trailing comment\n"
        << "episodes = 7\n"
        << "services = 13\n"
        << "scheduler = ddpg\n"
        << "seed = 99\n"
        << "lambda = 0.25\n"
        << "theta_pts = 5\n"
        << "hidden_layers = 3\n"
        << "hidden_units = 16\n"
        << "\n";
  }
  auto cfg = ScenarioConfig::from_file(path);
  CHECK(cfg.topology == "bteurope");
  CHECK(cfg.scenario == "12-8");
  CHECK(cfg.episodes == 7);
  CHECK(cfg.services_per_episode == 13);
  CHECK(cfg.scheduler == SchedulerKind::Ddpg);
  CHECK(cfg.seed == 99);
  CHECK(cfg.ridge.lambda == doctest::Approx(0.25));
  CHECK(cfg.reward.theta_pts == doctest::Approx(5.0));
  CHECK(cfg.ddpg.hidden == std::vector<int>{16, 16, 16});
  CHECK(cfg.embed.hidden == std::vector<int>{16, 16, 16});

  // serialize -> re-parse is a fixed point
  std::string path2 = "/tmp/nfvsim_cfg_test2.txt";
  {
    std::ofstream out(path2);
    out << cfg.serialize();
  }
  auto cfg2 = ScenarioConfig::from_file(path2);
  CHECK(cfg2.serialize() == cfg.serialize());
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("unknown keys and malformed lines are rejected") {
  ScenarioConfig cfg;
  CHECK_THROWS_AS(cfg.set("episdoes", "5"), std::invalid_argument);
  std::string path = "/tmp/nfvsim_cfg_bad.txt";
  {
    std::ofstream out(path);
    out << "episodes 5\n";  // no '='
  }
  CHECK_THROWS_AS(ScenarioConfig::from_file(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("config validation catches bad values") {
  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.scenario = "12-6";
  CHECK_THROWS(cfg.validate());
  cfg.scenario = "12-8";
  cfg.services_per_episode = 101;
  CHECK_THROWS(cfg.validate());
  cfg.services_per_episode = 50;
  cfg.reward.decay_base = 1.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("topology_path resolves names but passes .topo paths through") {
  ScenarioConfig cfg;
  cfg.topology = "netrail";
  cfg.data_dir = "data";
  CHECK(cfg.topology_path() == "data/netrail.topo");
  cfg.topology = "/abs/other.topo";
  CHECK(cfg.topology_path() == "/abs/other.topo");
}

TEST_CASE("empty episode yields null SARs and no counters") {
  auto cfg = small_config(SchedulerKind::Fifo, 4);
  cfg.services_per_episode = 0;
  Experiment exp(cfg);
  auto m = exp.run_episode(0);
  CHECK(m.offered == 0);
  CHECK(!m.sar().has_value());
  CHECK(!m.sar_low().has_value());
  CHECK(m.rr_state == "observe");
}

TEST_CASE("episode counters are conserved and consistent") {
  for (auto sched : {SchedulerKind::Fifo, SchedulerKind::Priority, SchedulerKind::Wfq,
                     SchedulerKind::Ddpg}) {
    auto cfg = small_config(sched, 11);
    Experiment exp(cfg);
    for (int e = 0; e < cfg.episodes; ++e) {
      auto m = exp.run_episode(e);
      CHECK(m.offered == cfg.services_per_episode);
      CHECK(m.accepted + m.timeouts + m.embed_rejects == m.offered);
      CHECK(std::accumulate(m.offered_macro.begin(), m.offered_macro.end(), 0) == m.offered);
      CHECK(std::accumulate(m.accepted_macro.begin(), m.accepted_macro.end(), 0) == m.accepted);
      CHECK(m.accepted_low <= m.offered_low);
      CHECK(m.accepted_high <= m.offered_high);
      CHECK(static_cast<int>(m.durations.size()) == m.offered);
      CHECK(m.mean_wait >= 0.0);
    }
  }
}

TEST_CASE("a fixed seed reproduces metrics exactly") {
  auto run = [] {
    auto cfg = small_config(SchedulerKind::Ddpg, 21);
    Experiment exp(cfg);
    std::ostringstream out;
    for (int e = 0; e < cfg.episodes; ++e) {
      auto m = exp.run_episode(e);
      out << m.accepted << ' ' << m.accepted_low << ' ' << m.timeouts << ' ' << m.mean_wait << ' '
          << m.mean_reward << '\n';
    }
    return out.str();
  };
  CHECK(run() == run());
}

TEST_CASE("summarize_window sums only the trailing episodes") {
  std::vector<EpisodeMetrics> ms(10);
  for (int i = 0; i < 10; ++i) {
    ms[i].offered = 10;
    ms[i].accepted = i;  // last 2: 8 + 9
    ms[i].offered_low = 2;
    ms[i].accepted_low = i % 2;
  }
  auto w = summarize_window(ms, 2);
  CHECK(w.offered == 20);
  CHECK(w.accepted == 17);
  CHECK(*w.sar() == doctest::Approx(17.0 / 20.0));
  CHECK(*w.sar_low() == doctest::Approx(1.0 / 4.0));  // episodes 8 (0) and 9 (1)
  // window larger than the history covers everything
  CHECK(summarize_window(ms, 100).offered == 100);
  CHECK(!summarize_window({}, 5).sar().has_value());
}

TEST_CASE("summary table reports hand-computed ratios against the first row") {
  WindowSummary base;
  base.offered = 100;
  base.accepted = 50;
  base.offered_low = 20;
  base.accepted_low = 4;  // sar_low 0.2
  WindowSummary twice = base;
  twice.accepted_low = 8;  // sar_low 0.4 -> ratio 2.0
  std::string table = summary_table({{"base", base}, {"twice", twice}});
  std::istringstream in(table);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == "label,sar,sar_low,sar_low_ratio_vs_first");
  CHECK(row1 == "base,0.500000,0.200000,1.000000");
  CHECK(row2 == "twice,0.500000,0.400000,2.000000");

  // zero low-priority offers in the reference row -> ratios are null
  WindowSummary none;
  none.offered = 10;
  none.accepted = 5;
  std::string guarded = summary_table({{"none", none}, {"twice", twice}});
  CHECK(guarded.find("none,0.500000,null,null") != std::string::npos);
  CHECK(guarded.find("twice,0.500000,0.400000,null") != std::string::npos);
}

TEST_CASE("run_experiment writes the expected files with the pinned CSV header") {
  auto cfg = small_config(SchedulerKind::Fifo, 31);
  cfg.episodes = 2;
  cfg.services_per_episode = 10;
  cfg.audit = true;
  std::string dir = "/tmp/nfvsim_harness_out";
  std::filesystem::remove_all(dir);
  auto metrics = run_experiment(cfg, dir);
  REQUIRE(metrics.size() == 2);

  std::ifstream csv(dir + "/metrics.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "episode,scheduler,offered,accepted,accepted_low,offered_low,sar,sar_low,"
        "timeouts,rr_state,rr_accuracy,mean_reward");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
    CHECK(line.find("fifo") != std::string::npos);
  }
  CHECK(rows == 2);
  CHECK(std::filesystem::exists(dir + "/manifest.txt"));
  CHECK(std::filesystem::exists(dir + "/summary.txt"));
  CHECK(std::filesystem::exists(dir + "/waits.txt"));

  // the manifest round-trips into an equivalent config
  auto loaded = ScenarioConfig::from_file(dir + "/manifest.txt");
  CHECK(loaded.serialize() == cfg.serialize());
  std::filesystem::remove_all(dir);
}

TEST_CASE("priority scheduler serves high priorities ahead of low ones") {
  auto cfg = small_config(SchedulerKind::Priority, 41);
  cfg.episodes = 6;
  cfg.services_per_episode = 40;
  Experiment exp(cfg);
  std::vector<EpisodeMetrics> ms;
  for (int e = 0; e < cfg.episodes; ++e) ms.push_back(exp.run_episode(e));
  auto w = summarize_window(ms, 3);
  REQUIRE(w.offered_high > 0);
  // under contention the head of the queue is all high-priority work
  CHECK(static_cast<double>(w.accepted_high) / w.offered_high >
        static_cast<double>(w.accepted) / w.offered);
}
