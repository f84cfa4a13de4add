#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "amlab/proposals.hpp"
#include "amlab/schedules.hpp"
#include "amlab/targets.hpp"

namespace amlab {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Declarative experiment description. Parsed from a single JSON object; CLI
// flags overwrite individual fields before validation. Canonicalization fills
// defaults and orders keys, making parse -> canonicalize -> serialize -> parse
// a fixed point, and the digest a stable content hash.
struct ExperimentConfig {
  std::string subcommand;
  nlohmann::json target = {{"kind", "uniform"}};
  nlohmann::json proposal = {{"theta", 1.0}, {"template", "gaussian"},
                             {"beta", 0.0}};
  nlohmann::json schedule = {{"kind", "power"}, {"c", 1.0}, {"gamma", 1.0}};
  std::size_t dim = 1;
  std::int64_t n_steps = 1000;
  std::vector<std::uint64_t> seeds;          // explicit list, or
  std::uint64_t master_seed = 1;             // master + replica count
  int n_replicas = 1;
  std::string output_dir = "out";
  std::int64_t record_every = 1;
  bool plot = false;
  nlohmann::json thresholds = nlohmann::json::object();

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);

  nlohmann::json to_json() const;  // canonical form
  std::string digest() const;      // hex content hash of the canonical form

  // resolved seed list: explicit seeds, else streams derived from the master
  std::vector<std::uint64_t> resolved_seeds() const;

  TargetDensity build_target() const;
  ProposalSpec build_proposal() const;
  WeightSchedule build_schedule() const;

  double threshold(const std::string& name, double fallback) const;
};

// FNV-1a 64-bit over a string; used for config digests.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace amlab
