#include "amlab/schedules.hpp"

#include <cmath>
#include <stdexcept>

namespace amlab {

WeightSchedule WeightSchedule::power(double c, double gamma) {
  if (!(c > 0.0) || c > 1.0) {
    throw std::invalid_argument("WeightSchedule::power: c must be in (0,1]");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("WeightSchedule::power: gamma must be > 0");
  }
  WeightSchedule s;
  s.kind_ = Kind::Power;
  s.c_ = c;
  s.gamma_ = gamma;
  s.label_ = "power";
  return s;
}

WeightSchedule WeightSchedule::custom(std::function<double(std::int64_t)> rule,
                                      std::string label) {
  if (!rule) throw std::invalid_argument("WeightSchedule::custom: empty rule");
  WeightSchedule s;
  s.kind_ = Kind::Custom;
  s.rule_ = std::move(rule);
  s.label_ = std::move(label);
  return s;
}

double WeightSchedule::weight(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("weight: index must be >= 1");
  if (n == 1) return 1.0;
  if (kind_ == Kind::Power) {
    return c_ * std::pow(static_cast<double>(n), -gamma_);
  }
  const double v = rule_(n);
  if (!(v > 0.0) || !(v < 1.0)) {
    throw std::domain_error("weight: custom rule returned " + std::to_string(v) +
                            " outside (0,1) at n = " + std::to_string(n));
  }
  return v;
}

bool WeightSchedule::admissible() const {
  if (kind_ != Kind::Power) return false;
  return c_ > 0.0 && c_ <= 1.0 && gamma_ > 0.5 && gamma_ <= 1.0;
}

namespace {

constexpr const char* kFiniteHorizonCaveat =
    "finite-horizon heuristic: divergence/limit behaviour checked on a prefix, "
    "not proven";

}  // namespace

AssumptionReport check_assumption_A1(const WeightSchedule& schedule,
                                     std::int64_t m_prime, std::int64_t n_max,
                                     double divergence_threshold) {
  if (m_prime < 2 || n_max <= m_prime) {
    throw std::invalid_argument("check_assumption_A1: need 2 <= m' < N");
  }
  AssumptionReport rep;
  rep.assumption_id = "A1";
  rep.horizon = n_max;
  rep.caveat = kFiniteHorizonCaveat;
  if (divergence_threshold <= 0.0) {
    divergence_threshold = 5.0 * schedule.weight(2);
  }

  // (i) monotone non-increasing, with eta_N below eta_{m'}/2 as a proxy for ->0
  double prev = schedule.weight(m_prime);
  bool mono_ok = true;
  for (std::int64_t n = m_prime + 1; n <= n_max; ++n) {
    const double w = schedule.weight(n);
    if (w > prev) {
      rep.witnesses.emplace_back(n, w - prev);
      mono_ok = false;
      break;
    }
    prev = w;
  }
  if (mono_ok && !(schedule.weight(n_max) <= 0.5 * schedule.weight(m_prime))) {
    rep.witnesses.emplace_back(n_max, schedule.weight(n_max));
  }

  // (ii) differences of eta^{-1/2} non-increasing
  double prev_diff = 1.0 / std::sqrt(schedule.weight(m_prime + 1)) -
                     1.0 / std::sqrt(schedule.weight(m_prime));
  for (std::int64_t n = m_prime + 1; n + 1 <= n_max; ++n) {
    const double diff = 1.0 / std::sqrt(schedule.weight(n + 1)) -
                        1.0 / std::sqrt(schedule.weight(n));
    if (diff > prev_diff * (1.0 + 1e-12) + 1e-15) {
      rep.witnesses.emplace_back(n + 1, diff - prev_diff);
      break;
    }
    prev_diff = diff;
  }

  // (iii) partial sum clears the divergence threshold
  double partial = 0.0;
  for (std::int64_t n = m_prime; n <= n_max; ++n) partial += schedule.weight(n);
  if (!(partial >= divergence_threshold)) {
    rep.witnesses.emplace_back(n_max, partial);
  }

  rep.passed = rep.witnesses.empty();
  return rep;
}

AssumptionReport check_assumption_A2(const WeightSchedule& schedule,
                                     std::int64_t n_max, double tol) {
  if (n_max < 10) throw std::invalid_argument("check_assumption_A2: need N >= 10");
  if (!(tol > 0.0)) throw std::invalid_argument("check_assumption_A2: tol > 0");
  AssumptionReport rep;
  rep.assumption_id = "A2";
  rep.horizon = n_max;
  rep.caveat = kFiniteHorizonCaveat;

  const double final_ratio =
      schedule.weight(n_max + 1) / schedule.weight(n_max);
  if (!(std::abs(final_ratio - 1.0) <= tol)) {
    rep.witnesses.emplace_back(n_max, final_ratio);
  }
  double prev_gap = 0.0;
  bool first = true;
  for (std::int64_t n = n_max / 2; n <= n_max; ++n) {
    const double ratio = schedule.weight(n + 1) / schedule.weight(n);
    const double gap = std::abs(ratio - 1.0);
    if (!first && gap > prev_gap * (1.0 + 1e-12) + 1e-15) {
      rep.witnesses.emplace_back(n, gap - prev_gap);
      break;
    }
    prev_gap = gap;
    first = false;
  }
  rep.passed = rep.witnesses.empty();
  return rep;
}

AssumptionReport check_assumption_A3(const WeightSchedule& schedule,
                                     std::int64_t n_max, double l1_threshold,
                                     double l2_tail_tol) {
  if (n_max < 10) throw std::invalid_argument("check_assumption_A3: need N >= 10");
  AssumptionReport rep;
  rep.assumption_id = "A3";
  rep.horizon = n_max;
  rep.caveat = kFiniteHorizonCaveat;

  const std::int64_t half = n_max / 2;
  if (l1_threshold <= 0.0) l1_threshold = 10.0 * schedule.weight(2);
  if (l2_tail_tol <= 0.0) {
    const double eh = schedule.weight(half);
    l2_tail_tol = 10.0 * eh * eh * static_cast<double>(half);
  }

  double l1 = 0.0, l2_tail = 0.0;
  for (std::int64_t n = 2; n <= n_max; ++n) {
    const double w = schedule.weight(n);
    l1 += w;
    if (n > half) l2_tail += w * w;
  }
  if (!(l1 >= l1_threshold)) rep.witnesses.emplace_back(n_max, l1);
  if (!(l2_tail <= l2_tail_tol)) rep.witnesses.emplace_back(n_max, l2_tail);
  rep.passed = rep.witnesses.empty();
  return rep;
}

}  // namespace amlab
