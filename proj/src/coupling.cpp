#include "amlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "amlab/quadrature.hpp"

namespace amlab {

namespace {

void check_normalized(const CouplingSpec& spec) {
  for (const auto* f : {&spec.p, &spec.q}) {
    const double mass = integrate(*f, spec.lo, spec.hi, 1e-8, 0.0).value;
    if (std::abs(mass - 1.0) > 1e-6) {
      throw std::invalid_argument(
          "coupling: density mass over the support box is " +
          std::to_string(mass) + ", expected 1 within 1e-6");
    }
  }
}

}  // namespace

double total_variation_1d(const CouplingSpec& spec) {
  check_normalized(spec);
  const auto diff = [&](double x) {
    return std::max(0.0, spec.q(x) - spec.p(x));
  };
  return integrate(diff, spec.lo, spec.hi, 1e-7, 0.0, 20000).value;
}

MaximalCoupler::MaximalCoupler(CouplingSpec spec) : spec_(std::move(spec)) {
  const std::size_t cells = spec_.envelope_cells;
  if (cells == 0 || !(spec_.hi > spec_.lo)) {
    throw std::invalid_argument("MaximalCoupler: bad support box");
  }
  cell_width_ = (spec_.hi - spec_.lo) / static_cast<double>(cells);
  envelope_.resize(cells);
  envelope_cdf_.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = spec_.lo + cell_width_ * static_cast<double>(i);
    double peak = 0.0;
    for (int k = 0; k <= 4; ++k) {
      const double t = a + cell_width_ * static_cast<double>(k) / 4.0;
      peak = std::max(peak, std::max(0.0, spec_.q(t) - spec_.p(t)));
    }
    envelope_[i] = 1.25 * peak;
    envelope_total_ += envelope_[i] * cell_width_;
    envelope_cdf_[i] = envelope_total_;
  }
}

CoupleResult MaximalCoupler::couple(double x, Rng& rng) const {
  const double px = spec_.p(x);
  const double qx = spec_.q(x);
  const double r = (px > 0.0) ? std::min(1.0, qx / px) : 1.0;
  if (rng.uniform01() < r) {
    return CoupleResult{x, true};
  }
  if (!(envelope_total_ > 0.0)) {
    throw std::runtime_error(
        "maximal_couple: residual envelope vanishes; densities agree on the "
        "grid yet the coupling draw was rejected");
  }
  for (std::int64_t it = 0; it < spec_.rejection_cap; ++it) {
    const double target = rng.uniform01() * envelope_total_;
    const std::size_t cell = static_cast<std::size_t>(
        std::lower_bound(envelope_cdf_.begin(), envelope_cdf_.end(), target) -
        envelope_cdf_.begin());
    const std::size_t i = std::min(cell, envelope_.size() - 1);
    const double a = spec_.lo + cell_width_ * static_cast<double>(i);
    const double y = a + cell_width_ * rng.uniform01();
    const double density = std::max(0.0, spec_.q(y) - spec_.p(y));
    if (density > 0.0 && rng.uniform01() * envelope_[i] <= density) {
      return CoupleResult{y, false};
    }
  }
  throw std::runtime_error(
      "maximal_couple: rejection cap exceeded; envelope too loose for the "
      "residual density");
}

CoupleResult maximal_couple(const CouplingSpec& spec, double x, Rng& rng) {
  return MaximalCoupler(spec).couple(x, rng);
}

}  // namespace amlab
