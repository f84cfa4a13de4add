#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "amlab/chain.hpp"
#include "amlab/proposals.hpp"
#include "amlab/rng.hpp"
#include "amlab/targets.hpp"

namespace amlab {

struct ConcentrationEstimate {
  double lambda = 0.0;
  double q_hat = 0.0;
  std::size_t n_samples = 0;
};

// Q(X; lambda) = sup_x P(X in [x, x+lambda]) estimated from a sample:
// the largest fraction of points contained in a closed window of width lambda
// anchored at a sample point. O(n) two-pointer sweep over sorted input.
ConcentrationEstimate concentration_function(const std::vector<double>& sorted,
                                             double lambda);

struct KrScalingCheck {
  std::vector<std::int64_t> step_counts;
  std::vector<double> q_hat;
  double slope = 0.0;
  bool passed = false;       // |slope + 1/2| <= 0.05
  bool precision_warning = false;
};

// Concentration of random-walk sums: estimates Q(sum of n steps; L) by Monte
// Carlo for each n and fits the log-log slope, which the Kolmogorov-Rogozin
// bound predicts to be -1/2. Steps are theta times a 1-d template draw.
KrScalingCheck kr_scaling_check(const TemplateKind& tmpl, double theta,
                                const std::vector<std::int64_t>& step_counts,
                                double window, std::int64_t trials,
                                std::uint64_t seed, int workers = 2);

struct DriftReport {
  double s = 0.0;
  double theta = 0.0;
  double tail_threshold = 0.0;  // M
  std::vector<double> grid_x;
  std::vector<double> drift_gap;  // 1 - P_s V(x) / V(x) per grid point
  double inf_tail = 0.0;          // infimum of the gap over |x - m| >= M
  double lambda_s = 0.0;          // 1 - inf_tail
  double drift_b = 0.0;           // max over grid of P_s V - lambda_s V
  double delta_s = 0.0;           // minorization constant
};

// Drift profile for a 1-d Laplace target with a Gaussian template proposal of
// increment std theta*sqrt(s): evaluates the Metropolis operator applied to
// V = (sup pi)^{1/2} pi^{-1/2} by direct quadrature.
DriftReport drift_profile(double s, double theta, const TargetDensity& laplace,
                          const std::vector<double>& x_grid, double tail_threshold,
                          double quad_tol = 1e-9);

// 1 - P_s V(x)/V(x) at a single point (exposed for convergence checks).
double drift_gap_at(double x, double s, double theta,
                    const TargetDensity& laplace, double quad_tol = 1e-9);

// V(x) = (sup pi)^{1/2} pi^{-1/2}(x); exp(|x-m|/(2b)) for Laplace(m, b).
double laplace_drift_v(const TargetDensity& laplace, double x);

// The a/b split of the same quantity (integral over |y| < |x| of the gain
// minus the integral over |y| > |x| of the loss); used as a cross-check
// identity against drift_gap_at.
double drift_gap_split(double x, double s, double theta,
                       const TargetDensity& laplace, double quad_tol = 1e-9);

// Certified minorization constant for C = [m-M, m+M]:
//   delta_s = |C| * q~_s(2M) * inf-density-ratio,
// the analytic inner bound on |C| inf_{x,y in C} q~_s(y-x) min{1, pi(y)/pi(x)}.
// Also evaluates the infimum on a grid (grid_value >= delta_s).
struct MinorizationEstimate {
  double delta_s = 0.0;
  double grid_value = 0.0;
};

MinorizationEstimate minorization_estimate(double s, double theta,
                                           const TargetDensity& laplace,
                                           double tail_threshold,
                                           std::size_t grid_points = 64);

struct SllnReport {
  std::string f_id;
  std::vector<double> running_means;
  double reference = 0.0;
  double final_error = 0.0;
};

// Registered functionals for ergodic averages over 1-d targets.
// f_id: "identity" | "square" | "exp_abs:<gamma>" | "indicator:<a>,<b>"
SllnReport ergodic_average(const ChainTrace& trace, const std::string& f_id,
                           const TargetDensity& target);

struct EigenFloorReport {
  std::vector<double> per_trace_min_lambda_min;
  std::vector<double> per_trace_log_min;  // log of the same, safe under growth
  // per trace: inf of lambda_min over the second half of the window divided
  // by the inf over the first half
  std::vector<double> per_trace_trend_ratio;
  std::vector<double> per_trace_log_trend_ratio;
  double trend_ratio = 0.0;  // worst (smallest) per-trace ratio
};

// Smallest eigenvalue statistics over a step window [first_step, last_step]
// (1-based, inclusive).
EigenFloorReport eigen_floor(const std::vector<ChainTrace>& traces,
                             std::int64_t first_step, std::int64_t last_step);

}  // namespace amlab
