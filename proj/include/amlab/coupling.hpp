#pragma once

#include <functional>
#include <vector>

#include "amlab/rng.hpp"

namespace amlab {

// A pair of normalized 1-d densities together with the support box used for
// quadrature and for building the rejection envelope of the residual
// max{0, q - p}.
struct CouplingSpec {
  std::function<double(double)> p;
  std::function<double(double)> q;
  double lo = -10.0;
  double hi = 10.0;
  std::size_t envelope_cells = 512;
  std::int64_t rejection_cap = 100000;
};

// Total variation distance (half-L1 convention) by adaptive quadrature with
// absolute error <= 1e-6. Throws if either density does not integrate to 1
// within 1e-6 over [lo, hi].
double total_variation_1d(const CouplingSpec& spec);

struct CoupleResult {
  double y = 0.0;
  bool coupled = false;
};

// Maximal coupling: given x distributed per p, produces y distributed per q
// with P(y == x) = 1 - TV(p, q). With probability min{1, q(x)/p(x)} the draw
// is x itself; otherwise y comes from the residual density proportional to
// max{0, q - p}, sampled by rejection from a piecewise-constant envelope
// precomputed on a grid over [lo, hi].
class MaximalCoupler {
 public:
  explicit MaximalCoupler(CouplingSpec spec);

  CoupleResult couple(double x, Rng& rng) const;

  // mass under the envelope; diagnostic for rejection efficiency
  double envelope_mass() const { return envelope_total_; }

 private:
  CouplingSpec spec_;
  std::vector<double> envelope_;
  std::vector<double> envelope_cdf_;
  double cell_width_ = 0.0;
  double envelope_total_ = 0.0;
};

// One-shot convenience wrapper.
CoupleResult maximal_couple(const CouplingSpec& spec, double x, Rng& rng);

}  // namespace amlab
