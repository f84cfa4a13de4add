#include "amlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amlab {

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("matvec: size mismatch");
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Vector add_scaled_lower_tri_product(const Vector& x, const Matrix& lower,
                                    double alpha, const Vector& w) {
  const std::size_t d = x.size();
  if (lower.rows() != d || lower.cols() != d || w.size() != d) {
    throw std::invalid_argument("add_scaled_lower_tri_product: size mismatch");
  }
  Vector y = x;
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += lower(i, j) * w[j];
    y[i] += alpha * s;
  }
  return y;
}

Matrix cholesky(const Matrix& s, double sym_rel_tol) {
  const std::size_t d = s.rows();
  if (s.cols() != d) throw std::invalid_argument("cholesky: matrix not square");
  double max_abs = 0.0;
  for (double v : s.data()) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > sym_rel_tol * std::max(max_abs, 1.0)) {
        throw std::invalid_argument("cholesky: matrix not symmetric");
      }
    }
  }
  Matrix l(d, d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = s(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw not_positive_definite(j, diag);
    }
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

double quadratic_form(const Matrix& s, const Vector& u) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < s.cols(); ++j) row += s(i, j) * u[j];
    total += u[i] * row;
  }
  return total;
}

std::vector<double> symmetric_eigenvalues(const Matrix& s) {
  const std::size_t d = s.rows();
  Matrix a = s;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += a(p, q) * a(p, q);
    double diag_scale = 0.0;
    for (std::size_t p = 0; p < d; ++p) diag_scale += a(p, p) * a(p, p);
    if (off <= 1e-30 * std::max(diag_scale, 1e-300)) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(d);
  for (std::size_t i = 0; i < d; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double lambda_min_from_factor(const Matrix& lower, int max_sweeps) {
  const std::size_t d = lower.rows();
  if (d == 1) {
    const double l = lower(0, 0);
    if (!(l > 0.0) || !std::isfinite(l)) throw not_positive_definite(0, l);
    return l * l;
  }
  // one-sided Jacobi SVD: orthogonalize the columns by plane rotations; the
  // smallest singular value keeps high relative accuracy even when the
  // eigenvalues of L L^T span hundreds of orders of magnitude.
  double max_abs = 0.0;
  for (double v : lower.data()) max_abs = std::max(max_abs, std::abs(v));
  if (!(max_abs > 0.0) || !std::isfinite(max_abs)) {
    throw not_positive_definite(0, max_abs);
  }
  // exact power-of-two prescale keeps column-norm products inside range
  const int exp2 = std::ilogb(max_abs);
  const double prescale = std::ldexp(1.0, -exp2);
  Matrix a = lower;
  for (auto& v : a.data()) v *= prescale;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        double aii = 0.0, ajj = 0.0, aij = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          aii += a(k, i) * a(k, i);
          ajj += a(k, j) * a(k, j);
          aij += a(k, i) * a(k, j);
        }
        if (std::abs(aij) <= 1e-18 * std::sqrt(aii) * std::sqrt(ajj)) continue;
        rotated = true;
        const double zeta = (ajj - aii) / (2.0 * aij);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < d; ++k) {
          const double aki = a(k, i), akj = a(k, j);
          a(k, i) = c * aki - s * akj;
          a(k, j) = s * aki + c * akj;
        }
      }
    }
    if (!rotated) break;
  }
  double min_norm2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d; ++j) {
    double norm2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) norm2 += a(k, j) * a(k, j);
    min_norm2 = std::min(min_norm2, norm2);
  }
  const double sigma_min = std::sqrt(min_norm2) / prescale;
  const double lambda = sigma_min * sigma_min;
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw not_positive_definite(0, lambda);
  }
  return lambda;
}

Matrix qr_r_factor(const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < n) throw std::invalid_argument("qr_r_factor: need rows >= cols");
  Matrix w = a;
  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += w(i, k) * w(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = (w(k, k) >= 0.0) ? -norm : norm;
    Vector v(m - k, 0.0);
    v[0] = w(k, k) - alpha;
    for (std::size_t i = k + 1; i < m; ++i) v[i - k] = w(i, k);
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = k; j < n; ++j) {
      double proj = 0.0;
      for (std::size_t i = k; i < m; ++i) proj += v[i - k] * w(i, j);
      proj *= 2.0 / vnorm2;
      for (std::size_t i = k; i < m; ++i) w(i, j) -= proj * v[i - k];
    }
  }
  Matrix r(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) r(i, j) = w(i, j);
  // flip rows so the implied lower factor has positive diagonal
  for (std::size_t i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) {
      for (std::size_t j = 0; j < n; ++j) r(i, j) = -r(i, j);
    }
  }
  return r;
}

Matrix factored_rank_one_update(const Matrix& lower, const Vector& v, double a,
                                double b) {
  const std::size_t d = lower.rows();
  const double sa = std::sqrt(a), sb = std::sqrt(b);
  // rows of B are the columns of [sqrt(a) L | sqrt(b) v]
  Matrix bmat(d + 1, d, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = j; i < d; ++i) bmat(j, i) = sa * lower(i, j);
  for (std::size_t i = 0; i < d; ++i) bmat(d, i) = sb * v[i];
  const Matrix r = qr_r_factor(bmat);
  Matrix lnew(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) lnew(i, j) = r(j, i);
  return lnew;
}

}  // namespace amlab
