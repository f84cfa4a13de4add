#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "amlab/config.hpp"
#include "amlab/driver.hpp"
#include "amlab/svg.hpp"

using namespace amlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "amlab_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parse, canonicalize, digest") {
  nlohmann::json j{{"subcommand", "expectation"},
                   {"n_steps", 100},
                   {"proposal", {{"theta", 0.5}, {"template", "gaussian"},
                                 {"beta", 0.0}}}};
  const auto cfg = ExperimentConfig::from_json(j);
  // round trip is a fixed point
  const auto again = ExperimentConfig::from_json(cfg.to_json());
  CHECK(cfg.to_json() == again.to_json());
  CHECK(cfg.digest() == again.digest());

  auto j2 = cfg.to_json();
  j2["n_steps"] = 101;
  CHECK(ExperimentConfig::from_json(j2).digest() != cfg.digest());
}

TEST_CASE("config schema errors carry field paths") {
  nlohmann::json bad{{"subcommand", "expectation"}, {"n_steps", -5}};
  try {
    ExperimentConfig::from_json(bad);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("config.n_steps") != std::string::npos);
  }

  nlohmann::json unknown{{"subcommand", "fly-to-the-moon"}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(unknown), config_error);

  nlohmann::json bad_target{{"subcommand", "am-run"},
                            {"target", {{"kind", "cauchy"}}}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_target), config_error);

  nlohmann::json bad_mix{{"subcommand", "am-run"},
                         {"proposal", {{"theta", 1.0}, {"beta", 0.5}}}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_mix), config_error);
}

TEST_CASE("replica seeds derive deterministically from the master seed") {
  nlohmann::json j{{"subcommand", "am-run"},
                   {"master_seed", 7},
                   {"n_replicas", 8}};
  const auto cfg = ExperimentConfig::from_json(j);
  const auto seeds = cfg.resolved_seeds();
  CHECK(seeds.size() == 8);
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    CHECK(seeds[k] == stream_seed(7, k));
  }
  // explicit lists win
  nlohmann::json j2{{"subcommand", "am-run"}, {"seeds", {3, 1, 4}}};
  CHECK(ExperimentConfig::from_json(j2).resolved_seeds() ==
        std::vector<std::uint64_t>{3, 1, 4});
}

TEST_CASE("driver: check-schedule exit codes") {
  {
    nlohmann::json j{{"subcommand", "check-schedule"},
                     {"schedule", {{"kind", "power"}, {"c", 1.0}, {"gamma", 1.0}}},
                     {"n_steps", 10000},
                     {"output_dir", fresh_dir("sched_ok").string()}};
    CHECK(run(ExperimentConfig::from_json(j)) == kExitOk);
  }
  {
    nlohmann::json j{{"subcommand", "check-schedule"},
                     {"schedule", {{"kind", "power"}, {"c", 1.0}, {"gamma", 0.4}}},
                     {"n_steps", 10000},
                     {"output_dir", fresh_dir("sched_bad").string()}};
    CHECK(run(ExperimentConfig::from_json(j)) == kExitThresholdFailure);
  }
}

TEST_CASE("driver: identical configs produce byte-identical artifacts") {
  const auto dir1 = fresh_dir("det1");
  const auto dir2 = fresh_dir("det2");
  nlohmann::json j{{"subcommand", "am-run"},
                   {"target", {{"kind", "laplace"}, {"m", 0.0}, {"b", 1.0}}},
                   {"proposal", {{"theta", 2.4}, {"template", "gaussian"},
                                 {"beta", 0.0}}},
                   {"n_steps", 500},
                   {"record_every", 5},
                   {"master_seed", 11},
                   {"n_replicas", 2}};
  j["output_dir"] = dir1.string();
  REQUIRE(run(ExperimentConfig::from_json(j)) == kExitOk);
  j["output_dir"] = dir2.string();
  REQUIRE(run(ExperimentConfig::from_json(j)) == kExitOk);
  const auto seeds = ExperimentConfig::from_json(j).resolved_seeds();
  for (const auto seed : seeds) {
    const std::string name = "trace_" + std::to_string(seed) + ".csv";
    CHECK(slurp((dir1 / name).string()) == slurp((dir2 / name).string()));
  }
  // trace files embed the digest
  const std::string head = slurp((dir1 / ("trace_" + std::to_string(seeds[0]) +
                                          ".csv")).string());
  CHECK(head.find("config_digest=") != std::string::npos);
}

TEST_CASE("driver: rerunning from the emitted config reproduces the outputs") {
  const auto dir1 = fresh_dir("emit1");
  const auto dir2 = fresh_dir("emit2");
  nlohmann::json j{{"subcommand", "expectation"},
                   {"proposal", {{"theta", 0.01}, {"template", "gaussian"},
                                 {"beta", 0.0}}},
                   {"n_steps", 20000},
                   {"record_every", 100},
                   {"output_dir", dir1.string()}};
  REQUIRE(run(ExperimentConfig::from_json(j)) == kExitOk);
  auto emitted = ExperimentConfig::from_file((dir1 / "config.json").string());
  auto j2 = emitted.to_json();
  j2["output_dir"] = dir2.string();  // excluded from the digest
  REQUIRE(run(ExperimentConfig::from_json(j2)) == kExitOk);
  CHECK(slurp((dir1 / "expectation.csv").string()) ==
        slurp((dir2 / "expectation.csv").string()));
}

TEST_CASE("driver: dip thresholds drive the exit code") {
  nlohmann::json j{{"subcommand", "dip"},
                   {"proposal", {{"theta", 2.0}, {"template", "gaussian"},
                                 {"beta", 0.0}}},
                   {"n_steps", 2000},
                   {"output_dir", fresh_dir("dip_fail").string()}};
  // monotone growth: argmin = 1, no dip, thresholds cannot hold
  CHECK(run(ExperimentConfig::from_json(j)) == kExitThresholdFailure);
}

TEST_CASE("driver: the dip plot marks the same index the profile reports") {
  const auto dir = fresh_dir("dip_svg");
  nlohmann::json j{{"subcommand", "dip"},
                   {"proposal", {{"theta", 0.05}, {"template", "gaussian"},
                                 {"beta", 0.0}}},
                   {"n_steps", 200000},
                   {"plot", true},
                   {"thresholds", {{"argmin_exceeds", 1.0},
                                   {"crossing_exceeds", 1.0}}},
                   {"output_dir", dir.string()}};
  REQUIRE(run(ExperimentConfig::from_json(j)) == kExitOk);
  nlohmann::json dip;
  std::ifstream((dir / "dip.json").string()) >> dip;
  const auto argmin = dip["argmin_index"].get<std::int64_t>();
  const std::string svg = slurp((dir / "plot.svg").string());
  const std::string marker =
      "minimum name=\"log E[S_n]\" x=\"" + std::to_string(argmin) + "\"";
  CHECK(svg.find(marker) != std::string::npos);
}

TEST_CASE("driver: gn convergence check at an achievable tolerance") {
  nlohmann::json j{{"subcommand", "gn"},
                   {"proposal", {{"theta", 2.0}, {"template", "gaussian"},
                                 {"beta", 0.0}}},
                   {"schedule", {{"kind", "power"}, {"c", 1.0}, {"gamma", 1.0}}},
                   {"n_steps", 1000000},
                   {"thresholds", {{"tolerance", 1e-3}}},
                   {"output_dir", fresh_dir("gn_ok").string()}};
  CHECK(run(ExperimentConfig::from_json(j)) == kExitOk);
}

TEST_CASE("svg plots: minimum marker, log-axis validation, multiple paths") {
  const auto dir = fresh_dir("svg");
  PlotSeries a{"b_small_theta", {}, {}};
  for (int i = 1; i <= 100; ++i) {
    a.x.push_back(i);
    a.y.push_back((i - 40) * (i - 40) + 3.0);
  }
  PlotSeries b{"b_unit_theta", a.x, {}};
  for (int i = 1; i <= 100; ++i) b.y.push_back(2.0 * i);
  PlotOptions opt;
  opt.mark_minimum = true;
  const std::string path = (dir / "plot.svg").string();
  emit_plot({a, b}, path, opt);
  const std::string svg = slurp(path);
  CHECK(svg.find("minimum name=\"b_small_theta\" x=\"40\"") != std::string::npos);
  std::size_t paths = 0, pos = 0;
  while ((pos = svg.find("<path", pos)) != std::string::npos) {
    ++paths;
    pos += 5;
  }
  CHECK(paths == 2);

  PlotSeries neg{"neg", {1.0, 2.0}, {-1.0, 1.0}};
  PlotOptions logopt;
  logopt.log_y = true;
  CHECK_THROWS_AS(emit_plot({neg}, (dir / "bad.svg").string(), logopt),
                  std::invalid_argument);
  CHECK_THROWS_AS(emit_plot({}, (dir / "empty.svg").string(), PlotOptions{}),
                  std::invalid_argument);
}
