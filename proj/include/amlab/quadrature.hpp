#pragma once

#include <functional>
#include <stdexcept>

namespace amlab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

class quadrature_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod (7-15) on [a,b]. Bisects the interval with the worst
// error estimate until the global estimate is below max(abs_tol, rel_tol*|I|).
// Throws quadrature_error if the tolerance is unreachable within max_intervals.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol = 1e-10,
                           double rel_tol = 1e-10, int max_intervals = 4000);

}  // namespace amlab
