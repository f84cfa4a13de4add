// Experiment driver for the adaptive Metropolis laboratory.
//
// Usage: amlab <subcommand> [--config file.json] [flags...]
// Flags override config fields; every subcommand writes its artifacts plus a
// canonical config.json into --out.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "amlab/config.hpp"
#include "amlab/driver.hpp"

namespace {

using amlab::ExperimentConfig;

bool parse_power_schedule(const std::string& text, nlohmann::json& out) {
  // accepted form: power:<c>,<gamma>
  if (text.rfind("power:", 0) != 0) return false;
  const std::string rest = text.substr(6);
  const auto comma = rest.find(',');
  if (comma == std::string::npos) return false;
  try {
    out = {{"kind", "power"},
           {"c", std::stod(rest.substr(0, comma))},
           {"gamma", std::stod(rest.substr(comma + 1))}};
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

bool parse_target(const std::string& text, nlohmann::json& out) {
  // uniform | laplace:<m>,<b> | gaussian
  if (text == "uniform") {
    out = {{"kind", "uniform"}};
    return true;
  }
  if (text == "gaussian") {
    out = {{"kind", "gaussian"}};
    return true;
  }
  if (text.rfind("laplace:", 0) == 0) {
    const std::string rest = text.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) return false;
    try {
      out = {{"kind", "laplace"},
             {"m", std::stod(rest.substr(0, comma))},
             {"b", std::stod(rest.substr(comma + 1))}};
    } catch (const std::exception&) {
      return false;
    }
    return true;
  }
  if (text == "laplace") {
    out = {{"kind", "laplace"}, {"m", 0.0}, {"b", 1.0}};
    return true;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive Metropolis covariance-stability laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir, schedule_text, target_text;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int replicas = 0;
  std::int64_t n_steps = 0, record_every = 0;
  std::size_t dim = 0;
  double theta = 0.0, beta = -1.0, sigma0 = 0.0;
  bool plot = false;

  const std::vector<std::string> subcommands = {
      "am-run",      "arw-run",      "expectation",   "dip",
      "gn",          "growth-check", "coupling-test", "drift-check",
      "kr-check",    "slln",         "eigen-floor",   "check-schedule"};
  for (const auto& name : subcommands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--replicas", replicas, "number of replica chains");
    sub->add_option("--n", n_steps, "number of steps / horizon");
    sub->add_option("--record-every", record_every, "full-state thinning");
    sub->add_option("--dim", dim, "state dimension");
    sub->add_option("--theta", theta, "proposal scaling");
    sub->add_option("--beta", beta, "fixed-component mixture weight");
    sub->add_option("--sigma0", sigma0, "fixed gaussian component std");
    sub->add_option("--schedule", schedule_text, "power:<c>,<gamma>");
    sub->add_option("--target", target_text,
                    "uniform | laplace[:m,b] | gaussian");
    sub->add_flag("--plot", plot, "emit an SVG plot");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string chosen = app.get_subcommands().front()->get_name();

  try {
    nlohmann::json j;
    if (!config_path.empty()) {
      j = amlab::ExperimentConfig::from_file(config_path).to_json();
    }
    j["subcommand"] = chosen;
    if (!out_dir.empty()) j["output_dir"] = out_dir;
    if (seed_set) {
      j["master_seed"] = seed;
      j.erase("seeds");
    }
    if (replicas > 0) j["n_replicas"] = replicas;
    if (n_steps > 0) j["n_steps"] = n_steps;
    if (record_every > 0) j["record_every"] = record_every;
    if (dim > 0) j["dim"] = dim;
    if (plot) j["plot"] = true;
    if (!schedule_text.empty()) {
      nlohmann::json sched;
      if (!parse_power_schedule(schedule_text, sched)) {
        std::cerr << "error: config.schedule: cannot parse '" << schedule_text
                  << "' (expected power:<c>,<gamma>)\n";
        return amlab::kExitError;
      }
      j["schedule"] = sched;
    }
    if (!target_text.empty()) {
      nlohmann::json target;
      if (!parse_target(target_text, target)) {
        std::cerr << "error: config.target: cannot parse '" << target_text
                  << "'\n";
        return amlab::kExitError;
      }
      j["target"] = target;
    }
    if (theta > 0.0) {
      j["proposal"]["theta"] = theta;
      if (!j["proposal"].contains("template")) {
        j["proposal"]["template"] = "gaussian";
      }
      if (!j["proposal"].contains("beta")) j["proposal"]["beta"] = 0.0;
    }
    if (beta >= 0.0) j["proposal"]["beta"] = beta;
    if (sigma0 > 0.0) {
      j["proposal"]["q_fix"] = {{"kind", "gaussian"}, {"sigma0", sigma0}};
    }

    const ExperimentConfig cfg = ExperimentConfig::from_json(j);
    const int code = amlab::run(cfg);
    if (code == amlab::kExitThresholdFailure) {
      std::cerr << chosen << ": threshold failure (see "
                << cfg.output_dir << ")\n";
    } else if (code == amlab::kExitCollapse) {
      std::cerr << chosen << ": covariance collapse diagnostic (see "
                << cfg.output_dir << ")\n";
    }
    return code;
  } catch (const amlab::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return amlab::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return amlab::kExitError;
  }
}
