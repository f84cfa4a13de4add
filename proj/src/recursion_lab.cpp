#include "amlab/recursion_lab.hpp"

#include <cmath>
#include <stdexcept>

namespace amlab {

double RecursionSeries::a(std::size_t n) const {
  return ratio[n - 1] * std::exp(log_b[n - 1]);
}

RecursionSeries expectation_series(double theta, const WeightSchedule& schedule,
                                   double a1, double b1, std::int64_t n_max) {
  if (n_max < 2) throw std::invalid_argument("expectation_series: need N >= 2");
  if (!(a1 >= 0.0)) throw std::invalid_argument("expectation_series: a1 >= 0");
  if (!(b1 > 0.0)) throw std::invalid_argument("expectation_series: b1 > 0");
  RecursionSeries s;
  s.theta = theta;
  s.schedule = schedule;
  s.log_b.resize(static_cast<std::size_t>(n_max));
  s.ratio.resize(static_cast<std::size_t>(n_max));
  double r = a1 / b1;
  double log_b = std::log(b1);
  s.log_b[0] = log_b;
  s.ratio[0] = r;
  const double theta2 = theta * theta;
  for (std::int64_t n = 1; n < n_max; ++n) {
    const double eta_n = schedule.weight(n);
    const double eta_next = schedule.weight(n + 1);
    const double r_tilde = (1.0 - eta_n) * (1.0 - eta_n) * r + theta2;
    const double phi = (1.0 - eta_next) + eta_next * r_tilde;
    log_b += std::log(phi);
    r = r_tilde / phi;
    s.log_b[static_cast<std::size_t>(n)] = log_b;
    s.ratio[static_cast<std::size_t>(n)] = r;
  }
  return s;
}

DipProfile dip_profile(double theta, const WeightSchedule& schedule, double a1,
                       double b1, std::int64_t n_max) {
  const RecursionSeries s = expectation_series(theta, schedule, a1, b1, n_max);
  DipProfile dip;
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < s.log_b.size(); ++i) {
    if (s.log_b[i] < s.log_b[argmin]) argmin = i;
  }
  dip.argmin_index = static_cast<std::int64_t>(argmin) + 1;
  dip.min_log_b = s.log_b[argmin];
  dip.min_value = std::exp(s.log_b[argmin]);
  for (std::size_t i = 1; i < s.log_b.size(); ++i) {
    if (s.log_b[i] > s.log_b[0]) {
      dip.first_exceed_index = static_cast<std::int64_t>(i) + 1;
      break;
    }
  }
  return dip;
}

GrowthBoundCheck growth_bound_check(const RecursionSeries& series, double lambda,
                                    std::int64_t n, std::int64_t k) {
  if (!(lambda > 1.0)) {
    throw std::invalid_argument("growth_bound_check: lambda must exceed 1");
  }
  if (n < 1 || k < 1 ||
      static_cast<std::size_t>(n + k) > series.log_b.size()) {
    throw std::invalid_argument("growth_bound_check: window outside series");
  }
  double weight_sum = 0.0;
  for (std::int64_t j = n + 1; j <= n + k; ++j) {
    weight_sum += std::sqrt(series.schedule.weight(j));
  }
  GrowthBoundCheck res;
  res.mid = series.log_b[static_cast<std::size_t>(n + k - 1)] -
            series.log_b[static_cast<std::size_t>(n - 1)];
  res.lhs = series.theta * weight_sum / lambda;
  res.rhs = series.theta * weight_sum * lambda;
  res.passed = res.lhs <= res.mid && res.mid <= res.rhs;
  return res;
}

double g_map(std::int64_t n, double theta_tilde, const WeightSchedule& schedule,
             double x) {
  const double eta_prev = schedule.weight(n - 1);
  const double eta = schedule.weight(n);
  const double one = 1.0 - eta_prev;
  return std::sqrt(eta) * (one * one * one / eta_prev * x /
                               (x + 1.0 / std::sqrt(eta_prev)) +
                           theta_tilde * theta_tilde);
}

double fixed_point(std::int64_t n, double theta_tilde,
                   const WeightSchedule& schedule) {
  if (n < 2) throw std::invalid_argument("fixed_point: need n >= 2");
  const double eta_prev = schedule.weight(n - 1);
  const double eta = schedule.weight(n);
  const double inv_sqrt_prev = 1.0 / std::sqrt(eta_prev);
  const double sqrt_eta = std::sqrt(eta);
  const double one = 1.0 - eta_prev;
  const double xi = inv_sqrt_prev - sqrt_eta / eta_prev * one * one * one -
                    sqrt_eta * theta_tilde * theta_tilde;
  const double mu = 4.0 * inv_sqrt_prev * sqrt_eta * theta_tilde * theta_tilde;
  return 0.5 * (-xi + std::sqrt(xi * xi + mu));
}

GnSeries g_series(double theta_tilde, const WeightSchedule& schedule,
                  double g_init, std::int64_t m1, std::int64_t n_max) {
  if (!(g_init >= 0.0)) throw std::invalid_argument("g_series: g_init >= 0");
  if (m1 < 2 || n_max <= m1) throw std::invalid_argument("g_series: need 2 <= m1 < N");
  GnSeries s;
  s.theta_tilde = theta_tilde;
  s.m1 = m1;
  const auto count = static_cast<std::size_t>(n_max - m1 + 1);
  s.g.resize(count);
  s.fixed_points.resize(count);
  s.g[0] = g_init;
  s.fixed_points[0] = g_init;
  double g = g_init;
  for (std::int64_t n = m1 + 1; n <= n_max; ++n) {
    g = g_map(n, theta_tilde, schedule, g);
    const auto i = static_cast<std::size_t>(n - m1);
    s.g[i] = g;
    s.fixed_points[i] = fixed_point(n, theta_tilde, schedule);
  }
  return s;
}

}  // namespace amlab
