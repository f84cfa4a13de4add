#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace amlab {

// Adaptation weight sequence eta_n. Weights live in (0,1) for n >= 2;
// weight(1) is the convention value 1 so that the first mean/covariance
// update fully overwrites the initial statistics.
class WeightSchedule {
 public:
  enum class Kind { Power, Custom };

  // eta_n = c * n^(-gamma) for n >= 2. Requires c in (0,1], gamma > 0.
  static WeightSchedule power(double c, double gamma);

  // Arbitrary rule for n >= 2; values must stay inside (0,1).
  static WeightSchedule custom(std::function<double(std::int64_t)> rule,
                               std::string label = "custom");

  double weight(std::int64_t n) const;

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double gamma() const { return gamma_; }
  const std::string& label() const { return label_; }

  // Whether (c, gamma) lies in the admissible box (0,1] x (1/2,1].
  bool admissible() const;

 private:
  WeightSchedule() = default;

  Kind kind_ = Kind::Power;
  double c_ = 1.0;
  double gamma_ = 1.0;
  std::function<double(std::int64_t)> rule_;
  std::string label_ = "power";
};

struct AssumptionReport {
  std::string assumption_id;  // "A1" | "A2" | "A3"
  std::int64_t horizon = 0;
  bool passed = false;
  // (index, offending quantity) for the first violation of each sub-check
  std::vector<std::pair<std::int64_t, double>> witnesses;
  std::string caveat;
};

// A1: on [m_prime, N] the weights are non-increasing and head to zero
// (eta_N <= eta_{m'}/2), the differences eta_{n+1}^{-1/2} - eta_n^{-1/2} are
// non-increasing, and the partial sum clears a divergence threshold.
// A threshold <= 0 requests the scale-aware default 5 * eta(2).
AssumptionReport check_assumption_A1(const WeightSchedule& schedule,
                                     std::int64_t m_prime, std::int64_t n_max,
                                     double divergence_threshold = 0.0);

// A2: eta_{n+1}/eta_n -> 1; checks |ratio(N) - 1| <= tol and that |ratio - 1|
// is non-increasing over the scanned tail [N/2, N].
AssumptionReport check_assumption_A2(const WeightSchedule& schedule,
                                     std::int64_t n_max, double tol);

// A3: square-summable but not summable, on a finite horizon: the partial sum
// must clear l1_threshold and the tail sum of squares over (N/2, N] must stay
// below l2_tail_tol. Thresholds <= 0 request the scale-aware defaults
// 10 * eta(2) and 10 * eta(N/2)^2 * (N/2).
AssumptionReport check_assumption_A3(const WeightSchedule& schedule,
                                     std::int64_t n_max,
                                     double l1_threshold = 0.0,
                                     double l2_tail_tol = 0.0);

}  // namespace amlab
