#include "tsopt/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace tsopt::linalg {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

ECMap map_of(const Matrix& m) { return ECMap(m.data(), m.rows(), m.cols()); }

Matrix from_eigen(const Eigen::Ref<const EMat>& e) {
  Matrix out(e.rows(), e.cols());
  EMap(out.data(), out.rows(), out.cols()) = e;
  return out;
}

void require_square(const Matrix& m, const char* who) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorKind::dimension_mismatch,
          std::string(who) + " needs a nonempty square matrix");
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorKind::dimension_mismatch, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::abs(v));
  return s;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::dimension_mismatch,
          "matrix add");
  return from_eigen(map_of(a) + map_of(b));
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::dimension_mismatch,
          "matrix sub");
  return from_eigen(map_of(a) - map_of(b));
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorKind::dimension_mismatch, "matrix mul");
  return from_eigen(map_of(a) * map_of(b));
}

Matrix operator*(double s, const Matrix& a) { return from_eigen(s * map_of(a)); }

std::vector<double> operator*(const Matrix& a, const std::vector<double>& x) {
  require(a.cols() == x.size(), ErrorKind::dimension_mismatch, "matvec");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

SymMatrix::SymMatrix(const Matrix& m) {
  require_square(m, "SymMatrix");
  m_ = Matrix(m.rows(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.rows(); ++j) m_(i, j) = 0.5 * (m(i, j) + m(j, i));
}

SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return SymMatrix(m);
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.as_matrix() + b.as_matrix());
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.as_matrix() - b.as_matrix());
}

SymEigen eigendecompose(const SymMatrix& c) {
  Eigen::SelfAdjointEigenSolver<EMat> es(map_of(c.as_matrix()));
  require(es.info() == Eigen::Success, ErrorKind::numerical_failure,
          "symmetric eigendecomposition did not converge");
  SymEigen out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + c.dim());
  out.vectors = from_eigen(es.eigenvectors());
  return out;
}

SymMatrix sqrtm_psd(const SymMatrix& c, double tol) {
  if (tol < 0.0) tol = 1e-10 * std::max(1.0, c.frobenius_norm());
  SymEigen eig = eigendecompose(c);
  for (double& v : eig.values) {
    require(v >= -tol, ErrorKind::not_psd,
            "eigenvalue " + std::to_string(v) + " below -" + std::to_string(tol));
    if (v < 0.0) v = 0.0;
  }
  const std::size_t n = c.dim();
  ECMap v = map_of(eig.vectors);
  Eigen::VectorXd lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = std::sqrt(eig.values[i]);
  EMat s = v * lam.asDiagonal() * v.transpose();
  return SymMatrix(from_eigen(s));
}

SymMatrix solve_lyapunov(const Matrix& a, const SymMatrix& q) {
  require_square(a, "solve_lyapunov");
  const std::size_t n = a.rows();
  require(n == q.dim(), ErrorKind::dimension_mismatch, "solve_lyapunov A vs Q");
  require(n <= 64, ErrorKind::unsupported_size,
          "solve_lyapunov supports dimension <= 64");

  // Column-stacked vec: vec(AX) = (I (x) A) vec(X), vec(X A^T) = (A (x) I) vec(X).
  const std::size_t nn = n * n;
  EMat k = EMat::Zero(nn, nn);
  ECMap am = map_of(a);
  for (std::size_t col = 0; col < n; ++col)
    k.block(col * n, col * n, n, n) += am;
  for (std::size_t bi = 0; bi < n; ++bi)
    for (std::size_t bj = 0; bj < n; ++bj)
      if (am(bi, bj) != 0.0)
        k.block(bi * n, bj * n, n, n) += am(bi, bj) * EMat::Identity(n, n);

  Eigen::VectorXd vq(nn);
  for (std::size_t col = 0; col < n; ++col)
    for (std::size_t row = 0; row < n; ++row) vq[col * n + row] = -q(row, col);

  Eigen::FullPivLU<EMat> lu(k);
  require(lu.isInvertible(), ErrorKind::singular_system,
          "Lyapunov operator is singular (eigenvalues of A sum to zero)");
  Eigen::VectorXd vx = lu.solve(vq);

  Matrix x(n, n);
  for (std::size_t col = 0; col < n; ++col)
    for (std::size_t row = 0; row < n; ++row) x(row, col) = vx[col * n + row];
  return SymMatrix(x);
}

bool is_hurwitz(const Matrix& a, double margin) {
  require_square(a, "is_hurwitz");
  Eigen::EigenSolver<EMat> es(map_of(a), /*computeEigenvectors=*/false);
  require(es.info() == Eigen::Success, ErrorKind::numerical_failure,
          "eigenvalue computation did not converge");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i].real() >= -margin) return false;
  return true;
}

Matrix solve(const Matrix& a, const Matrix& b) {
  require_square(a, "solve");
  require(a.rows() == b.rows(), ErrorKind::dimension_mismatch, "solve A vs B");
  Eigen::FullPivLU<EMat> lu(map_of(a));
  require(lu.isInvertible(), ErrorKind::singular_matrix, "singular system matrix");
  return from_eigen(lu.solve(map_of(b)));
}

std::vector<double> solve(const Matrix& a, const std::vector<double>& b) {
  Matrix col(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) col(i, 0) = b[i];
  Matrix x = solve(a, col);
  std::vector<double> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = x(i, 0);
  return out;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

Matrix delta_matrix(const Matrix& a11, const Matrix& a12, const Matrix& a21,
                    const Matrix& a22) {
  require_square(a11, "delta_matrix A11");
  require_square(a22, "delta_matrix A22");
  require(a12.rows() == a11.rows() && a12.cols() == a22.rows() &&
              a21.rows() == a22.rows() && a21.cols() == a11.rows(),
          ErrorKind::dimension_mismatch, "delta_matrix block shapes");
  return a11 - a12 * solve(a22, a21);
}

}  // namespace tsopt::linalg
