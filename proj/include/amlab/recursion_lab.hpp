#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "amlab/schedules.hpp"

namespace amlab {

// Expectation recursion for the always-accept chain, per direction:
//   a_{n+1} = (1-eta_n)^2 a_n + theta^2 b_n
//   b_{n+1} = (1-eta_{n+1}) b_n + eta_{n+1} a_{n+1}
// carried in the (ratio, log b) parameterization so that b_n ~ e^{O(sqrt n)}
// never overflows: with r~_n = a_{n+1}/b_n,
//   r~ = (1-eta_n)^2 r + theta^2,   log b' = log b + log((1-eta') + eta' r~),
//   r' = r~ / ((1-eta') + eta' r~).
struct RecursionSeries {
  double theta = 0.0;
  WeightSchedule schedule = WeightSchedule::power(1.0, 1.0);
  // index n = 1..N lives at position n-1
  std::vector<double> log_b;
  std::vector<double> ratio;  // r_n = a_n / b_n

  double a(std::size_t n) const;  // reconstructed, may overflow for huge n
};

RecursionSeries expectation_series(double theta, const WeightSchedule& schedule,
                                   double a1, double b1, std::int64_t n_max);

struct DipProfile {
  std::int64_t argmin_index = 0;
  double min_value = 0.0;  // b at the argmin (may underflow gracefully)
  double min_log_b = 0.0;
  std::optional<std::int64_t> first_exceed_index;  // first n with b_n > b_1
};

DipProfile dip_profile(double theta, const WeightSchedule& schedule, double a1,
                       double b1, std::int64_t n_max);

struct GrowthBoundCheck {
  double lhs = 0.0;  // (1/lambda) * theta * sum sqrt(eta_j)
  double mid = 0.0;  // log(b_{n+k} / b_n)
  double rhs = 0.0;  // lambda * theta * sum sqrt(eta_j)
  bool passed = false;
};

GrowthBoundCheck growth_bound_check(const RecursionSeries& series, double lambda,
                                    std::int64_t n, std::int64_t k);

// Scalar comparison recursion
//   g_{n+1} = eta_{n+1}^{1/2} ((1-eta_n)^3/eta_n * g_n/(g_n + eta_n^{-1/2})
//             + theta~^2)
// together with the fixed points of the underlying contraction maps.
struct GnSeries {
  double theta_tilde = 0.0;
  std::int64_t m1 = 2;
  std::vector<double> g;             // g_{m1}, g_{m1+1}, ..., g_N
  std::vector<double> fixed_points;  // x*_n aligned with g (x*_{m1} unset = g[0])
};

GnSeries g_series(double theta_tilde, const WeightSchedule& schedule,
                  double g_init, std::int64_t m1, std::int64_t n_max);

// Fixed point x*_n of the map f_n, n >= 2:
//   x*_n = (-xi_n + sqrt(xi_n^2 + mu_n)) / 2
//   xi_n = eta_{n-1}^{-1/2} - eta_n^{1/2} eta_{n-1}^{-1} (1-eta_{n-1})^3
//          - eta_n^{1/2} theta~^2
//   mu_n = 4 eta_{n-1}^{-1/2} eta_n^{1/2} theta~^2
double fixed_point(std::int64_t n, double theta_tilde,
                   const WeightSchedule& schedule);

// The map f_n itself (exposed for the fixed-point property test).
double g_map(std::int64_t n, double theta_tilde, const WeightSchedule& schedule,
             double x);

}  // namespace amlab
