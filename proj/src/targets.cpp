#include "amlab/targets.hpp"

#include <cmath>

namespace amlab {

TargetDensity TargetDensity::improper_uniform(std::size_t dim) {
  TargetDensity t;
  t.kind_ = Kind::ImproperUniform;
  t.dim_ = dim;
  t.label_ = "uniform";
  return t;
}

TargetDensity TargetDensity::laplace(double m, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("laplace: scale must be > 0");
  TargetDensity t;
  t.kind_ = Kind::Laplace;
  t.dim_ = 1;
  t.laplace_m_ = m;
  t.laplace_b_ = b;
  t.label_ = "laplace";
  return t;
}

TargetDensity TargetDensity::gaussian(Vector mean, Matrix cov) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw std::invalid_argument("gaussian: mean/cov dimension mismatch");
  }
  TargetDensity t;
  t.kind_ = Kind::Gaussian;
  t.dim_ = mean.size();
  t.gauss_mean_ = std::move(mean);
  t.gauss_chol_ = cholesky(cov);
  double log_det = 0.0;
  for (std::size_t i = 0; i < t.dim_; ++i) log_det += std::log(t.gauss_chol_(i, i));
  log_det *= 2.0;
  t.gauss_log_norm_ =
      -0.5 * (static_cast<double>(t.dim_) * std::log(2.0 * M_PI) + log_det);
  t.label_ = "gaussian";
  return t;
}

TargetDensity TargetDensity::custom(std::size_t dim,
                                    std::function<double(const Vector&)> f,
                                    std::string label) {
  if (!f) throw std::invalid_argument("custom target: empty log-density");
  TargetDensity t;
  t.kind_ = Kind::Custom;
  t.dim_ = dim;
  t.custom_ = std::move(f);
  t.label_ = std::move(label);
  return t;
}

double TargetDensity::log_density(const Vector& x) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("log_density: point has wrong dimension");
  }
  switch (kind_) {
    case Kind::ImproperUniform:
      return 0.0;
    case Kind::Laplace:
      return -std::log(2.0 * laplace_b_) - std::abs(x[0] - laplace_m_) / laplace_b_;
    case Kind::Gaussian: {
      // quadratic form through the factor: solve L z = (x - mean)
      Vector z(dim_);
      for (std::size_t i = 0; i < dim_; ++i) z[i] = x[i] - gauss_mean_[i];
      for (std::size_t i = 0; i < dim_; ++i) {
        double v = z[i];
        for (std::size_t j = 0; j < i; ++j) v -= gauss_chol_(i, j) * z[j];
        z[i] = v / gauss_chol_(i, i);
      }
      return gauss_log_norm_ - 0.5 * dot(z, z);
    }
    case Kind::Custom: {
      const double v = custom_(x);
      if (std::isnan(v)) {
        throw std::domain_error("custom log-density returned NaN");
      }
      return v;
    }
  }
  return -std::numeric_limits<double>::infinity();
}

double log_acceptance_ratio(const TargetDensity& target, const Vector& x,
                            const Vector& y) {
  const double lx = target.log_density(x);
  if (lx == -std::numeric_limits<double>::infinity()) {
    throw invalid_chain_state("chain is sitting at a zero-density state");
  }
  return target.log_density(y) - lx;
}

double acceptance_probability(const TargetDensity& target, const Vector& x,
                              const Vector& y) {
  const double delta = log_acceptance_ratio(target, x, y);
  if (delta >= 0.0) return 1.0;
  return std::exp(delta);
}

}  // namespace amlab
