#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace amlab {

using Vector = std::vector<double>;

// Dense row-major matrix; everything in this project is small (d <= ~8).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Raised when a matrix that must be positive definite is not. This is a
// first-class diagnostic for the chain engine: an adapted covariance whose
// Cholesky fails aborts the run and is reported, never repaired.
class not_positive_definite : public std::runtime_error {
 public:
  not_positive_definite(std::size_t pivot, double value)
      : std::runtime_error("matrix not positive definite: pivot " +
                           std::to_string(pivot) + " = " + std::to_string(value)),
        pivot_index(pivot),
        pivot_value(value) {}

  std::size_t pivot_index;
  double pivot_value;
};

double dot(const Vector& a, const Vector& b);
Vector matvec(const Matrix& m, const Vector& v);

// y = x + alpha * L * w  for lower-triangular L
Vector add_scaled_lower_tri_product(const Vector& x, const Matrix& lower,
                                    double alpha, const Vector& w);

// Checks symmetry to a relative tolerance and factors s = L L^T.
// Throws not_positive_definite when a pivot is not strictly positive.
Matrix cholesky(const Matrix& s, double sym_rel_tol = 1e-12);

// Quadratic form u^T S u for symmetric S.
double quadratic_form(const Matrix& s, const Vector& u);

// All eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& s);

// Smallest eigenvalue of L L^T computed from the factor L by power iteration
// on (L L^T)^{-1}. Works at condition numbers where forming L L^T would lose
// the small eigenvalue to cancellation.
double lambda_min_from_factor(const Matrix& lower, int max_sweeps = 30);

// R factor (upper triangular, positive diagonal) of the QR decomposition of a
// general m x n matrix with m >= n, via Householder reflections.
Matrix qr_r_factor(const Matrix& a);

// Given lower-triangular L and vector v, returns lower-triangular L' with
// L' L'^T = a * L L^T + b * v v^T  (a, b >= 0), via QR of [sqrt(a)L | sqrt(b)v]^T.
Matrix factored_rank_one_update(const Matrix& lower, const Vector& v, double a,
                                double b);

}  // namespace amlab
