#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amlab/linalg.hpp"
#include "amlab/proposals.hpp"
#include "amlab/rng.hpp"
#include "amlab/schedules.hpp"
#include "amlab/targets.hpp"

namespace amlab {

// Chain state (X_n, M_n, S_n). S must stay symmetric positive definite; a
// Cholesky failure during a run is recorded as a collapse diagnostic, never
// silently repaired.
struct AmState {
  std::int64_t n = 1;
  Vector x;
  Vector m;
  Matrix s;
};

// m defaults to the starting point.
AmState make_initial_state(Vector x1, Matrix s1);
AmState make_initial_state(Vector x1, Vector m1, Matrix s1);

struct StepResult {
  Vector x_next;
  bool accepted = false;
  bool used_fixed = false;
};

// One Metropolis transition from state.x using the proposal built on state.s.
// Draw order: template vector, branch uniform, then (non-uniform targets only)
// the acceptance uniform. Targets flagged always-accept skip the accept draw.
StepResult metropolis_step(const AmState& state, const ProposalSpec& spec,
                           const TargetDensity& target, Rng& rng);

// Mean/covariance recursion with weight eta_{n+1}:
//   M' = (1-eta)M + eta X',   S' = (1-eta)S + eta (X'-M)(X'-M)^T
// Note S uses the pre-update mean.
AmState am_update(const AmState& state, const Vector& x_next, double eta_next);

struct CollapseDiagnostic {
  std::int64_t step = 0;  // 1-based step at which the update failed
  Matrix s;               // offending covariance
  std::string what;
};

class insufficient_resolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Recorded history of a run. Per-step summaries (lambda_min, acceptance flag,
// fixed-branch flag, mean, covariance diagonal) are dense; full states are
// kept every record_every steps plus the final state.
//
// Runs on an improper uniform target can grow S beyond double range; the
// engine then rescales (x, m, S) by an exact power of two and records the
// exponent. True values are stored_value * 2^log2_scale (x, m) and
// * 2^(2*log2_scale) (S, lambda_min). Ordinary targets always have scale 0.
struct ChainTrace {
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::int64_t record_every = 1;
  std::int64_t steps_completed = 0;

  AmState initial;
  double theta = 0.0;
  WeightSchedule schedule = WeightSchedule::power(1.0, 1.0);

  // dense, one entry per completed step k = 1.. (state index initial.n + k)
  std::vector<double> lambda_min;
  std::vector<std::int32_t> log2_scale;
  std::vector<std::uint8_t> accepted;
  std::vector<std::uint8_t> used_fixed;
  std::vector<double> m_dense;       // dim doubles per step
  std::vector<double> s_diag_dense;  // dim doubles per step

  // thinned full records
  std::vector<std::int64_t> rec_n;
  std::vector<double> rec_x;        // dim per record
  std::vector<double> rec_m;        // dim per record
  std::vector<double> rec_s_upper;  // dim*(dim+1)/2 per record, row-major upper
  std::vector<double> rec_lambda_min;
  std::vector<std::int32_t> rec_log2_scale;
  std::vector<std::uint8_t> rec_accepted;
  std::vector<std::uint8_t> rec_used_fixed;

  std::optional<CollapseDiagnostic> collapse;

  std::size_t record_count() const { return rec_n.size(); }
  Vector record_x(std::size_t i) const;
  Vector record_m(std::size_t i) const;
  Matrix record_s(std::size_t i) const;

  double acceptance_rate() const;
  // log of the true lambda_min after step k (1-based), scale folded in
  double log_lambda_min_at_step(std::int64_t k) const;
};

// Runs the adaptive Metropolis chain for n_steps transitions. Deterministic
// given the seed. Improper uniform targets dispatch to the always-accept
// engine, which carries S in factored form with power-of-two rescaling.
ChainTrace run_am(const TargetDensity& target, const ProposalSpec& spec,
                  const WeightSchedule& schedule, const AmState& init,
                  std::int64_t n_steps, std::int64_t record_every,
                  std::uint64_t seed);

// The uniform-target recursion X' = X + theta S^{1/2} W with every proposal
// accepted; identical to run_am on an improper uniform target.
ChainTrace run_adaptive_random_walk(const ProposalSpec& spec,
                                    const WeightSchedule& schedule,
                                    const AmState& init, std::int64_t n_steps,
                                    std::int64_t record_every,
                                    std::uint64_t seed);

struct ZSeries {
  Vector u;
  std::vector<double> z;  // Z_{n+1} per transition, in trace order
  // cumulative sum of log(1 + eta_{n+1} (Z_{n+1}^2 - 1)); reconstructs
  // log(u^T S_n u / u^T S_1 u)
  std::vector<double> cum_log_growth;
};

// Normalized displacements Z_{n+1} = u^T (X_{n+1} - M_n) / ||S_n^{1/2} u||.
// Requires record_every == 1 (consecutive states).
ZSeries z_sequence(const ChainTrace& trace, const Vector& u);

}  // namespace amlab
