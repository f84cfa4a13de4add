#include "amlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "amlab/rng.hpp"

namespace amlab {

namespace {

const std::set<std::string> kSubcommands = {
    "am-run",      "arw-run",   "expectation", "dip",
    "gn",          "growth-check", "coupling-test", "drift-check",
    "kr-check",    "slln",      "eigen-floor", "check-schedule"};

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw config_error("config." + path + ": " + msg);
}

double get_number(const nlohmann::json& j, const std::string& path,
                  const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(path + "." + key, "expected a number");
  return j[key].get<double>();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("config: expected a JSON object");
  ExperimentConfig c;
  if (!j.contains("subcommand") || !j["subcommand"].is_string()) {
    fail("subcommand", "required string");
  }
  c.subcommand = j["subcommand"].get<std::string>();
  if (kSubcommands.find(c.subcommand) == kSubcommands.end()) {
    fail("subcommand", "unknown subcommand '" + c.subcommand + "'");
  }
  if (j.contains("target")) {
    if (!j["target"].is_object()) fail("target", "expected an object");
    c.target = j["target"];
  }
  if (j.contains("proposal")) {
    if (!j["proposal"].is_object()) fail("proposal", "expected an object");
    c.proposal = j["proposal"];
  }
  if (j.contains("schedule")) {
    if (!j["schedule"].is_object()) fail("schedule", "expected an object");
    c.schedule = j["schedule"];
  }
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<std::int64_t>() < 1) {
      fail("dim", "expected a positive integer");
    }
    c.dim = j["dim"].get<std::size_t>();
  }
  if (j.contains("n_steps")) {
    if (!j["n_steps"].is_number_integer() || j["n_steps"].get<std::int64_t>() < 1) {
      fail("n_steps", "expected a positive integer");
    }
    c.n_steps = j["n_steps"].get<std::int64_t>();
  }
  if (j.contains("seeds")) {
    if (!j["seeds"].is_array()) fail("seeds", "expected an array");
    for (const auto& s : j["seeds"]) {
      if (!s.is_number_integer() ||
          (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
        fail("seeds", "expected non-negative integers");
      }
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("master_seed")) {
    const auto& ms = j["master_seed"];
    if (!ms.is_number_integer() ||
        (!ms.is_number_unsigned() && ms.get<std::int64_t>() < 0)) {
      fail("master_seed", "expected a non-negative integer");
    }
    c.master_seed = ms.get<std::uint64_t>();
  }
  if (j.contains("n_replicas")) {
    if (!j["n_replicas"].is_number_integer() ||
        j["n_replicas"].get<std::int64_t>() < 1) {
      fail("n_replicas", "expected a positive integer");
    }
    c.n_replicas = j["n_replicas"].get<int>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) fail("output_dir", "expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("record_every")) {
    if (!j["record_every"].is_number_integer() ||
        j["record_every"].get<std::int64_t>() < 1) {
      fail("record_every", "expected a positive integer");
    }
    c.record_every = j["record_every"].get<std::int64_t>();
  }
  if (j.contains("plot")) {
    if (!j["plot"].is_boolean()) fail("plot", "expected a boolean");
    c.plot = j["plot"].get<bool>();
  }
  if (j.contains("thresholds")) {
    if (!j["thresholds"].is_object()) fail("thresholds", "expected an object");
    c.thresholds = j["thresholds"];
  }
  // validate the component specs eagerly so errors carry field paths
  c.build_target();
  c.build_proposal();
  c.build_schedule();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config: JSON parse failure: " + std::string(e.what()));
  }
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["target"] = target;
  j["proposal"] = proposal;
  j["schedule"] = schedule;
  j["dim"] = dim;
  j["n_steps"] = n_steps;
  if (!seeds.empty()) {
    j["seeds"] = seeds;
  } else {
    j["master_seed"] = master_seed;
    j["n_replicas"] = n_replicas;
  }
  j["output_dir"] = output_dir;
  j["record_every"] = record_every;
  j["plot"] = plot;
  j["thresholds"] = thresholds;
  return j;
}

std::string ExperimentConfig::digest() const {
  // presentation-only fields stay out of the hash so a rerun into a different
  // directory reproduces data files byte for byte
  nlohmann::json j = to_json();
  j.erase("output_dir");
  j.erase("plot");
  std::ostringstream hex;
  hex << std::hex << fnv1a64(j.dump());
  return hex.str();
}

std::vector<std::uint64_t> ExperimentConfig::resolved_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(n_replicas));
  for (int k = 0; k < n_replicas; ++k) {
    out.push_back(stream_seed(master_seed, static_cast<std::uint64_t>(k)));
  }
  return out;
}

TargetDensity ExperimentConfig::build_target() const {
  const std::string kind = target.value("kind", "uniform");
  if (kind == "uniform") return TargetDensity::improper_uniform(dim);
  if (kind == "laplace") {
    if (dim != 1) fail("target", "laplace target is one-dimensional");
    return TargetDensity::laplace(get_number(target, "target", "m", 0.0),
                                  get_number(target, "target", "b", 1.0));
  }
  if (kind == "gaussian") {
    Vector mean(dim, 0.0);
    if (target.contains("mean")) {
      if (!target["mean"].is_array() || target["mean"].size() != dim) {
        fail("target.mean", "expected an array of length dim");
      }
      for (std::size_t i = 0; i < dim; ++i) mean[i] = target["mean"][i].get<double>();
    }
    Matrix cov = Matrix::identity(dim);
    if (target.contains("cov")) {
      const auto& jc = target["cov"];
      if (!jc.is_array() || jc.size() != dim) {
        fail("target.cov", "expected a dim x dim array");
      }
      for (std::size_t i = 0; i < dim; ++i) {
        if (!jc[i].is_array() || jc[i].size() != dim) {
          fail("target.cov", "expected a dim x dim array");
        }
        for (std::size_t k = 0; k < dim; ++k) cov(i, k) = jc[i][k].get<double>();
      }
    }
    return TargetDensity::gaussian(std::move(mean), std::move(cov));
  }
  fail("target.kind", "unknown target '" + kind + "'");
}

ProposalSpec ExperimentConfig::build_proposal() const {
  ProposalSpec spec;
  spec.theta = get_number(proposal, "proposal", "theta", 1.0);
  const std::string tmpl = proposal.value("template", "gaussian");
  if (tmpl == "gaussian") {
    spec.tmpl = TemplateKind::gaussian();
  } else if (tmpl == "student") {
    spec.tmpl = TemplateKind::student(get_number(proposal, "proposal", "nu", 3.0));
  } else if (tmpl == "uniform_ball") {
    spec.tmpl = TemplateKind::uniform_ball();
  } else {
    fail("proposal.template", "unknown template '" + tmpl + "'");
  }
  spec.beta = get_number(proposal, "proposal", "beta", 0.0);
  if (proposal.contains("q_fix")) {
    const auto& qf = proposal["q_fix"];
    if (!qf.is_object()) fail("proposal.q_fix", "expected an object");
    const std::string fk = qf.value("kind", "gaussian");
    if (fk == "gaussian") {
      spec.q_fix = FixedProposal::gaussian(get_number(qf, "proposal.q_fix",
                                                      "sigma0", 1.0));
    } else if (fk == "uniform_ball") {
      spec.q_fix = FixedProposal::uniform_ball(get_number(qf, "proposal.q_fix",
                                                          "radius", 1.0));
    } else {
      fail("proposal.q_fix.kind", "unknown fixed proposal '" + fk + "'");
    }
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    fail("proposal", e.what());
  }
  return spec;
}

WeightSchedule ExperimentConfig::build_schedule() const {
  const std::string kind = schedule.value("kind", "power");
  if (kind != "power") fail("schedule.kind", "only 'power' is configurable");
  try {
    return WeightSchedule::power(get_number(schedule, "schedule", "c", 1.0),
                                 get_number(schedule, "schedule", "gamma", 1.0));
  } catch (const std::exception& e) {
    fail("schedule", e.what());
  }
}

double ExperimentConfig::threshold(const std::string& name,
                                   double fallback) const {
  return get_number(thresholds, "thresholds", name, fallback);
}

}  // namespace amlab
