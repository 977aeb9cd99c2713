#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "tsopt/errors.hpp"

namespace tsopt::linalg {

// Dense row-major matrix of doubles. This backs the covariance and rate
// theory computations, which stay small; bulk pixel data lives elsewhere.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transposed() const;
  double frobenius_norm() const;
  double max_abs() const;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
std::vector<double> operator*(const Matrix& a, const std::vector<double>& x);

// Symmetric matrix. Construction from a square matrix symmetrizes it as
// (M + M^T)/2, so every downstream eigendecomposition sees an exactly
// symmetric operand regardless of how the input was accumulated.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : m_(dim, dim, 0.0) {}
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(const std::vector<double>& d);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& as_matrix() const { return m_; }
  double frobenius_norm() const { return m_.frobenius_norm(); }

private:
  Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);

struct SymEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

SymEigen eigendecompose(const SymMatrix& c);

// Symmetric PSD square root via eigendecomposition. Eigenvalues in
// [-tol, 0) are treated as rounding residue and clamped to zero; anything
// below -tol raises not_psd. tol < 0 selects the default
// 1e-10 * max(1, ||C||_F).
SymMatrix sqrtm_psd(const SymMatrix& c, double tol = -1.0);

// Solves A X + X A^T = -Q by Kronecker vectorization:
// (I (x) A + A (x) I) vec(X) = -vec(Q). The solution is unique iff no two
// eigenvalues of A sum to zero; in particular it exists for Hurwitz A, where
// X = integral of e^{At} Q e^{A^T t} dt is PSD whenever Q is. Raises
// singular_system when the vectorized operator is numerically singular and
// unsupported_size above dimension 64 (the Kronecker system is dense).
SymMatrix solve_lyapunov(const Matrix& a, const SymMatrix& q);

// True iff every eigenvalue of A has real part < -margin.
bool is_hurwitz(const Matrix& a, double margin = 0.0);

// Delta = A11 - A12 A22^{-1} A21, the slow-block Schur complement of the
// two-block drift matrix. Raises singular_matrix when A22 is not invertible.
Matrix delta_matrix(const Matrix& a11, const Matrix& a12, const Matrix& a21,
                    const Matrix& a22);

// Full-pivot LU solves; raise singular_matrix on rank deficiency.
Matrix solve(const Matrix& a, const Matrix& b);
std::vector<double> solve(const Matrix& a, const std::vector<double>& b);
Matrix inverse(const Matrix& a);

}  // namespace tsopt::linalg
