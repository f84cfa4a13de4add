#pragma once

#include <optional>
#include <string>

#include "amlab/linalg.hpp"
#include "amlab/rng.hpp"

namespace amlab {

// Spherically symmetric template distributions with unit shape matrix.
// The Student template has a unit shape (not unit variance); its second
// moment is nu/(nu-2) when that exists.
struct TemplateKind {
  enum class Family { Gaussian, Student, UniformBall };

  static TemplateKind gaussian() { return {Family::Gaussian, 0.0}; }
  static TemplateKind student(double nu);
  static TemplateKind uniform_ball() { return {Family::UniformBall, 0.0}; }

  Family family = Family::Gaussian;
  double nu = 0.0;
};

// Fixed (non-adaptive) symmetric increment law for the mixture proposal.
struct FixedProposal {
  enum class Family { Gaussian, UniformBall };

  static FixedProposal gaussian(double sigma0);
  static FixedProposal uniform_ball(double radius);

  Family family = Family::Gaussian;
  double parameter = 1.0;  // sigma0 or radius
};

struct ProposalSpec {
  double theta = 1.0;                     // scaling: increment = theta * S^{1/2} W
  TemplateKind tmpl = TemplateKind::gaussian();
  double beta = 0.0;                      // probability of the fixed component
  std::optional<FixedProposal> q_fix;     // required when beta > 0

  void validate() const;
};

// Lower-triangular factor of an adapted covariance, L L^T = S.
struct CovFactor {
  Matrix lower;
};

CovFactor cholesky_factor(const Matrix& s);

Vector sample_template(const TemplateKind& kind, std::size_t d, Rng& rng);

Vector sample_fixed(const FixedProposal& fix, std::size_t d, Rng& rng);

// y = x + theta * L * w with a caller-provided template draw (pure).
Vector propose_adaptive(const Vector& x, const CovFactor& factor, double theta,
                        const Vector& w);

// Draws w itself.
Vector propose_adaptive(const Vector& x, const CovFactor& factor, double theta,
                        const TemplateKind& kind, Rng& rng);

struct MixtureDraw {
  Vector y;
  bool used_fixed = false;
};

// Fixed draw order: template vector first, then the branch uniform, then (only
// on the fixed branch) the fixed-component draw. This keeps traces
// reproducible and makes beta = 0 consume the same stream as the pure
// adaptive proposal.
MixtureDraw propose_mixture(const Vector& x, const CovFactor& factor,
                            const ProposalSpec& spec, Rng& rng);

}  // namespace amlab
