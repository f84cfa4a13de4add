#include "amlab/proposals.hpp"

#include <cmath>
#include <stdexcept>

namespace amlab {

TemplateKind TemplateKind::student(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("student template: nu must be > 0");
  return {Family::Student, nu};
}

FixedProposal FixedProposal::gaussian(double sigma0) {
  if (!(sigma0 > 0.0)) {
    throw std::invalid_argument("fixed gaussian: sigma0 must be > 0");
  }
  return {Family::Gaussian, sigma0};
}

FixedProposal FixedProposal::uniform_ball(double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("fixed uniform ball: radius must be > 0");
  }
  return {Family::UniformBall, radius};
}

void ProposalSpec::validate() const {
  if (!(theta > 0.0)) throw std::invalid_argument("proposal: theta must be > 0");
  if (beta < 0.0 || beta >= 1.0) {
    throw std::invalid_argument("proposal: beta must be in [0,1)");
  }
  if (beta > 0.0 && !q_fix.has_value()) {
    throw std::invalid_argument("proposal: beta > 0 requires a fixed component");
  }
}

CovFactor cholesky_factor(const Matrix& s) { return CovFactor{cholesky(s)}; }

namespace {

Vector unit_sphere_direction(std::size_t d, Rng& rng) {
  Vector w(d);
  for (;;) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      w[i] = rng.normal();
      norm2 += w[i] * w[i];
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& v : w) v *= inv;
      return w;
    }
  }
}

}  // namespace

Vector sample_template(const TemplateKind& kind, std::size_t d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("sample_template: d must be >= 1");
  switch (kind.family) {
    case TemplateKind::Family::Gaussian: {
      Vector w(d);
      for (auto& v : w) v = rng.normal();
      return w;
    }
    case TemplateKind::Family::Student: {
      Vector w(d);
      for (auto& v : w) v = rng.normal();
      const double chi2 = rng.chi_squared(kind.nu);
      const double scale = std::sqrt(kind.nu / chi2);
      for (auto& v : w) v *= scale;
      return w;
    }
    case TemplateKind::Family::UniformBall: {
      Vector w = unit_sphere_direction(d, rng);
      const double r = std::pow(rng.uniform_pos(), 1.0 / static_cast<double>(d));
      for (auto& v : w) v *= r;
      return w;
    }
  }
  throw std::logic_error("sample_template: unknown template family");
}

Vector sample_fixed(const FixedProposal& fix, std::size_t d, Rng& rng) {
  switch (fix.family) {
    case FixedProposal::Family::Gaussian: {
      Vector v(d);
      for (auto& y : v) y = fix.parameter * rng.normal();
      return v;
    }
    case FixedProposal::Family::UniformBall: {
      Vector v = unit_sphere_direction(d, rng);
      const double r =
          fix.parameter * std::pow(rng.uniform_pos(), 1.0 / static_cast<double>(d));
      for (auto& y : v) y *= r;
      return v;
    }
  }
  throw std::logic_error("sample_fixed: unknown fixed-proposal family");
}

Vector propose_adaptive(const Vector& x, const CovFactor& factor, double theta,
                        const Vector& w) {
  return add_scaled_lower_tri_product(x, factor.lower, theta, w);
}

Vector propose_adaptive(const Vector& x, const CovFactor& factor, double theta,
                        const TemplateKind& kind, Rng& rng) {
  return propose_adaptive(x, factor, theta, sample_template(kind, x.size(), rng));
}

MixtureDraw propose_mixture(const Vector& x, const CovFactor& factor,
                            const ProposalSpec& spec, Rng& rng) {
  spec.validate();
  const Vector w = sample_template(spec.tmpl, x.size(), rng);
  const double branch = rng.uniform01();
  MixtureDraw draw;
  if (branch < spec.beta) {
    const Vector v = sample_fixed(*spec.q_fix, x.size(), rng);
    draw.y = x;
    for (std::size_t i = 0; i < x.size(); ++i) draw.y[i] += v[i];
    draw.used_fixed = true;
  } else {
    draw.y = propose_adaptive(x, factor, spec.theta, w);
    draw.used_fixed = false;
  }
  return draw;
}

}  // namespace amlab
