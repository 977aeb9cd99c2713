#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tsopt/linalg.hpp"
#include "tsopt/rng.hpp"

using tsopt::Error;
using tsopt::ErrorKind;
using tsopt::Rng;
using namespace tsopt::linalg;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = scale * (2.0 * rng.uniform01() - 1.0);
  return m;
}

SymMatrix random_psd(Rng& rng, std::size_t n, double scale = 1.0) {
  Matrix b = random_matrix(rng, n, n, scale);
  return SymMatrix(b.transposed() * b);
}

// Independent oracle: Gauss-Jordan inverse with partial pivoting. Kept free
// of the library's solver so the Schur-complement path is cross-checked
// against a different elimination.
Matrix invert_gauss(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(aug(r, col)) > std::abs(aug(pivot, col))) pivot = r;
    REQUIRE(std::abs(aug(pivot, col)) > 1e-12);
    if (pivot != col)
      for (std::size_t j = 0; j < 2 * n; ++j) std::swap(aug(pivot, j), aug(col, j));
    const double d = aug(col, col);
    for (std::size_t j = 0; j < 2 * n; ++j) aug(col, j) /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = aug(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < 2 * n; ++j) aug(r, j) -= f * aug(col, j);
    }
  }
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

}  // namespace

TEST_CASE("sqrtm of the identity is the identity") {
  SymMatrix s = sqrtm_psd(SymMatrix::identity(3));
  CHECK(max_abs_diff(s.as_matrix(), Matrix::identity(3)) < 1e-14);
}

TEST_CASE("sqrtm of a diagonal matrix takes roots of the diagonal") {
  SymMatrix s = sqrtm_psd(SymMatrix::diagonal({4.0, 9.0}));
  CHECK(s(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(s(0, 1)) < 1e-14);
}

TEST_CASE("sqrtm squared reproduces random PSD inputs") {
  Rng rng(20240817);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    SymMatrix c = random_psd(rng, n, 2.0);
    SymMatrix s = sqrtm_psd(c);
    const double resid = max_abs_diff((s.as_matrix() * s.as_matrix()), c.as_matrix());
    CHECK(resid <= 1e-8 * std::max(1.0, c.frobenius_norm()));
  }
}

TEST_CASE("sqrtm commutes with its input") {
  Rng rng(7);
  SymMatrix c = random_psd(rng, 5);
  SymMatrix s = sqrtm_psd(c);
  Matrix sc = s.as_matrix() * c.as_matrix();
  Matrix cs = c.as_matrix() * s.as_matrix();
  CHECK((sc - cs).frobenius_norm() <= 1e-8 * c.frobenius_norm());
}

TEST_CASE("sqrtm clamps rounding-level negative eigenvalues") {
  SymMatrix near = SymMatrix::diagonal({1.0, -1e-12});
  SymMatrix s = sqrtm_psd(near);
  CHECK(s(1, 1) == 0.0);
  CHECK(s(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("sqrtm rejects genuinely indefinite input") {
  SymMatrix bad = SymMatrix::diagonal({1.0, -1e-3});
  CHECK_THROWS_AS(sqrtm_psd(bad), Error);
  try {
    sqrtm_psd(bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_psd);
  }
}

TEST_CASE("lyapunov identity example") {
  // A = -I, Q = 2I: -2X = -2I so X = I.
  Matrix a = -1.0 * Matrix::identity(2);
  SymMatrix x = solve_lyapunov(a, SymMatrix::diagonal({2.0, 2.0}));
  CHECK(max_abs_diff(x.as_matrix(), Matrix::identity(2)) < 1e-12);
}

TEST_CASE("lyapunov scalar example") {
  Matrix a{{-3.0}};
  SymMatrix x = solve_lyapunov(a, SymMatrix::diagonal({6.0}));
  CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lyapunov solutions are symmetric, residual-small and PSD for PSD Q") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(4);
    // -(B B^T + I) plus a skew part keeps the numerical range in Re < -1,
    // so A is Hurwitz by construction.
    Matrix b = random_matrix(rng, n, n);
    Matrix skew = random_matrix(rng, n, n);
    skew = 0.5 * (skew - skew.transposed());
    Matrix a = -1.0 * (b * b.transposed() + Matrix::identity(n)) + skew;
    REQUIRE(is_hurwitz(a));

    SymMatrix q = random_psd(rng, n);
    SymMatrix x = solve_lyapunov(a, q);

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(x(i, j) == x(j, i));

    Matrix resid = a * x.as_matrix() + x.as_matrix() * a.transposed() + q.as_matrix();
    CHECK(resid.frobenius_norm() <= 1e-10 * (1.0 + q.frobenius_norm()));

    SymEigen eig = eigendecompose(x);
    CHECK(eig.values.front() >= -1e-10 * (1.0 + x.frobenius_norm()));
  }
}

TEST_CASE("lyapunov rejects resonant spectra") {
  // Eigenvalues 1 and -1 sum to zero, so the vectorized operator is singular.
  Matrix a = SymMatrix::diagonal({1.0, -1.0}).as_matrix();
  CHECK_THROWS_AS(solve_lyapunov(a, SymMatrix::identity(2)), Error);
  try {
    solve_lyapunov(a, SymMatrix::identity(2));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_system);
  }
}

TEST_CASE("lyapunov refuses oversized systems") {
  Matrix a = -1.0 * Matrix::identity(65);
  try {
    solve_lyapunov(a, SymMatrix::identity(65));
    FAIL("expected unsupported_size");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_size);
  }
}

TEST_CASE("hurwitz classification") {
  CHECK(is_hurwitz(-1.0 * Matrix::identity(3)));
  Matrix rot{{0.0, 1.0}, {-1.0, 0.0}};  // purely imaginary spectrum
  CHECK_FALSE(is_hurwitz(rot));
  Matrix damped{{-0.5, 0.0}, {0.0, -0.5}};
  CHECK(is_hurwitz(damped, 0.1));
  CHECK_FALSE(is_hurwitz(damped, 1.0));
}

TEST_CASE("hurwitz is invariant under similarity transforms") {
  Rng rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(4);
    Matrix a = random_matrix(rng, n, n);
    Matrix p = Matrix::identity(n) + 0.1 * random_matrix(rng, n, n);
    Matrix similar = p * a * invert_gauss(p);
    CHECK(is_hurwitz(a) == is_hurwitz(similar));
  }
}

TEST_CASE("delta matrix with zero coupling is the slow block") {
  Matrix a11{{3.0, 1.0}, {0.0, 2.0}};
  Matrix zero(2, 2, 0.0);
  Matrix a22 = Matrix::identity(2);
  CHECK(max_abs_diff(delta_matrix(a11, zero, zero, a22), a11) == 0.0);
}

TEST_CASE("delta matrix scalar example") {
  Matrix d = delta_matrix(Matrix{{2.0}}, Matrix{{1.0}}, Matrix{{1.0}}, Matrix{{2.0}});
  CHECK(d(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("delta matrix matches the elimination oracle on random blocks") {
  Rng rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 1 + rng.below(4), k = 1 + rng.below(4);
    Matrix a11 = random_matrix(rng, m, m);
    Matrix a12 = random_matrix(rng, m, k);
    Matrix a21 = random_matrix(rng, k, m);
    Matrix a22 = random_matrix(rng, k, k) + 3.0 * Matrix::identity(k);
    Matrix expect = a11 - a12 * invert_gauss(a22) * a21;
    CHECK(max_abs_diff(delta_matrix(a11, a12, a21, a22), expect) <= 1e-9);
  }
}

TEST_CASE("delta matrix rejects singular fast blocks") {
  Matrix singular(2, 2, 1.0);
  try {
    delta_matrix(Matrix::identity(2), Matrix::identity(2), Matrix::identity(2),
                 singular);
    FAIL("expected singular_matrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_matrix);
  }
}
