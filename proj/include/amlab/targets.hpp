#pragma once

#include <functional>
#include <limits>
#include <string>

#include "amlab/linalg.hpp"

namespace amlab {

class invalid_chain_state : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target density pi, evaluated in log space only. An improper uniform target
// (log pi == 0 everywhere) is flagged so the chain engine can take the
// always-accept path.
class TargetDensity {
 public:
  enum class Kind { ImproperUniform, Laplace, Gaussian, Custom };

  static TargetDensity improper_uniform(std::size_t dim);
  // one-dimensional, log pi(x) = -log(2b) - |x - m| / b
  static TargetDensity laplace(double m, double b);
  static TargetDensity gaussian(Vector mean, Matrix cov);
  static TargetDensity custom(std::size_t dim,
                              std::function<double(const Vector&)> log_density,
                              std::string label = "custom");

  double log_density(const Vector& x) const;

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool always_accepts() const { return kind_ == Kind::ImproperUniform; }
  const std::string& label() const { return label_; }

  double laplace_m() const { return laplace_m_; }
  double laplace_b() const { return laplace_b_; }

 private:
  TargetDensity() = default;

  Kind kind_ = Kind::ImproperUniform;
  std::size_t dim_ = 1;
  std::string label_;
  double laplace_m_ = 0.0, laplace_b_ = 1.0;
  Vector gauss_mean_;
  Matrix gauss_chol_;
  double gauss_log_norm_ = 0.0;
  std::function<double(const Vector&)> custom_;
};

// exp(min{0, log pi(y) - log pi(x)}); 0 when y is outside the support.
// Throws invalid_chain_state when x itself has zero density.
double acceptance_probability(const TargetDensity& target, const Vector& x,
                              const Vector& y);

// Log-domain acceptance threshold: log pi(y) - log pi(x) (may be -inf).
double log_acceptance_ratio(const TargetDensity& target, const Vector& x,
                            const Vector& y);

}  // namespace amlab
