#include <cmath>
#include <vector>

#include "cmoments/linalg.hpp"
#include "cmoments/rng.hpp"
#include "doctest.h"

using namespace cmoments;

namespace {

SymMatrix random_spd(std::size_t d, SplitMix64& rng) {
  Matrix a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = 2.0 * rng.uniform() - 1.0;
  SymMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a(k, i) * a(k, j);
      m.at(i, j) = s;
    }
  return m;
}

SymMatrix random_symmetric(std::size_t d, SplitMix64& rng) {
  SymMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.at(i, j) = 2.0 * rng.uniform() - 1.0;
  return m;
}

// Shifted power iteration, an independent route to the top eigenpair.
EigenPair power_top(const SymMatrix& m, int iters = 20000) {
  const std::size_t d = m.dim();
  const double shift = m.frobenius_norm() + 1.0;
  Vec v(d, 0.0);
  v[0] = 1.0;
  for (std::size_t i = 1; i < d; ++i) v[i] = 1e-3 * (i + 1);
  v = normalized(v);
  for (int it = 0; it < iters; ++it) {
    Vec w = matvec(m, v);
    for (std::size_t i = 0; i < d; ++i) w[i] += shift * v[i];
    v = normalized(w);
  }
  const Vec mv = matvec(m, v);
  return {dot(v, mv), v};
}

}  // namespace

TEST_CASE("mean and covariance") {
  SUBCASE("hand-checked square of points") {
    Matrix x(4, 2);
    x(0, 0) = 0; x(0, 1) = 0;
    x(1, 0) = 2; x(1, 1) = 0;
    x(2, 0) = 0; x(2, 1) = 2;
    x(3, 0) = 2; x(3, 1) = 2;
    auto [mean, cov] = mean_cov(x);
    CHECK(mean[0] == doctest::Approx(1.0));
    CHECK(mean[1] == doctest::Approx(1.0));
    CHECK(cov(0, 0) == doctest::Approx(1.0));
    CHECK(cov(1, 1) == doctest::Approx(1.0));
    CHECK(cov(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("repeated point has zero covariance") {
    Matrix x(5, 3);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t j = 0; j < 3; ++j) x(r, j) = 1.5 * (j + 1);
    auto [mean, cov] = mean_cov(x);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(cov(i, j) == 0.0);
    CHECK(mean[2] == doctest::Approx(4.5));
  }
  SUBCASE("too few rows") {
    Matrix x(1, 2);
    CHECK_THROWS_AS(mean_cov(x), std::invalid_argument);
  }
}

TEST_CASE("jacobi eigendecomposition") {
  SUBCASE("diagonal") {
    SymMatrix m(2);
    m.at(0, 0) = 3.0;
    m.at(1, 1) = 1.0;
    const auto pairs = sym_eigen(m);
    CHECK(pairs[0].value == doctest::Approx(3.0));
    CHECK(pairs[1].value == doctest::Approx(1.0));
    CHECK(std::fabs(pairs[0].vector[0]) == doctest::Approx(1.0));
    CHECK(pairs[0].vector[1] == doctest::Approx(0.0));
  }
  SUBCASE("textbook 2x2") {
    SymMatrix m(2);
    m.at(0, 0) = 2.0;
    m.at(0, 1) = 1.0;
    m.at(1, 1) = 2.0;
    const auto pairs = sym_eigen(m);
    CHECK(pairs[0].value == doctest::Approx(3.0));
    CHECK(pairs[1].value == doctest::Approx(1.0));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::fabs(pairs[0].vector[0]) == doctest::Approx(inv_sqrt2));
    CHECK(pairs[0].vector[0] * pairs[0].vector[1] > 0.0);
    CHECK(pairs[1].vector[0] * pairs[1].vector[1] < 0.0);
  }
  SUBCASE("reconstruction, orthonormality, residuals on random input") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t d = 10;
      const SymMatrix m = random_symmetric(d, rng);
      const auto pairs = sym_eigen(m);
      // V Lambda V^T = M
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          double s = 0.0;
          for (const auto& p : pairs) s += p.value * p.vector[i] * p.vector[j];
          CHECK(std::fabs(s - m(i, j)) < 1e-9);
        }
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = p; q < d; ++q) {
          const double g = dot(pairs[p].vector, pairs[q].vector);
          CHECK(std::fabs(g - (p == q ? 1.0 : 0.0)) < 1e-10);
        }
      // residual bound per eigenpair
      double op_bound = 0.0;
      for (const auto& p : pairs) op_bound = std::max(op_bound, std::fabs(p.value));
      for (const auto& p : pairs) {
        Vec mv = matvec(m, p.vector);
        for (std::size_t i = 0; i < d; ++i) mv[i] -= p.value * p.vector[i];
        CHECK(norm(mv) <= 1e-8 * (1.0 + std::fabs(p.value)) * op_bound);
      }
      // trace identity
      double sum = 0.0;
      for (const auto& p : pairs) sum += p.value;
      CHECK(std::fabs(sum - m.trace()) < 1e-9 * std::max(1.0, m.frobenius_norm()));
    }
  }
  SUBCASE("eigenvalue product equals determinant for a hand case") {
    SymMatrix m(3);
    m.at(0, 0) = 4.0; m.at(0, 1) = 1.0; m.at(0, 2) = 0.5;
    m.at(1, 1) = 3.0; m.at(1, 2) = -0.25;
    m.at(2, 2) = 2.0;
    // determinant by cofactor expansion
    const double det = 4.0 * (3.0 * 2.0 - 0.0625) - 1.0 * (1.0 * 2.0 + 0.125) +
                       0.5 * (-0.25 - 1.5);
    const auto pairs = sym_eigen(m);
    CHECK(pairs[0].value * pairs[1].value * pairs[2].value ==
          doctest::Approx(det).epsilon(1e-10));
  }
  SUBCASE("agrees with shifted power iteration on SPD 20x20") {
    SplitMix64 rng(4242);
    for (int trial = 0; trial < 3; ++trial) {
      const SymMatrix m = random_spd(20, rng);
      const auto pairs = sym_eigen(m);
      const EigenPair ref = power_top(m);
      CHECK(std::fabs(pairs[0].value - ref.value) < 1e-7 * std::max(1.0, ref.value));
      CHECK(std::fabs(std::fabs(dot(pairs[0].vector, ref.vector)) - 1.0) < 1e-7);
    }
  }
}

TEST_CASE("inverse square root") {
  SUBCASE("identity and diagonal") {
    const SymMatrix eye = SymMatrix::identity(3);
    const SymMatrix w = inv_sqrt(eye);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        CHECK(w(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));

    SymMatrix diag(2);
    diag.at(0, 0) = 4.0;
    diag.at(1, 1) = 9.0;
    const SymMatrix wd = inv_sqrt(diag);
    CHECK(wd(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(wd(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(wd(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("sandwich identity and commutation on random SPD") {
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 4; ++trial) {
      const std::size_t d = 8;
      const SymMatrix m = random_spd(d, rng);
      const SymMatrix w = inv_sqrt(m);
      // w m w = I
      const Matrix prod = matmul(matmul(w.to_dense(), m.to_dense()), w.to_dense());
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          CHECK(std::fabs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);
      // w commutes with m
      const Matrix wm = matmul(w.to_dense(), m.to_dense());
      const Matrix mw = matmul(m.to_dense(), w.to_dense());
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          CHECK(std::fabs(wm(i, j) - mw(i, j)) < 1e-9 * std::max(1.0, m.frobenius_norm()));
    }
  }
  SUBCASE("degenerate input is rejected") {
    SymMatrix zero(3);
    CHECK_THROWS_AS(inv_sqrt(zero), std::runtime_error);
  }
  SUBCASE("floor caps amplification") {
    SymMatrix m(2);
    m.at(0, 0) = 1.0;
    m.at(1, 1) = 1e-20;  // numerically zero direction
    const SymMatrix w = inv_sqrt(m);  // floor = 1e-12 * lambda_max
    CHECK(w(1, 1) <= 1.0 / std::sqrt(1e-12) + 1.0);
  }
}

TEST_CASE("solvers and orthonormalization") {
  SplitMix64 rng(5150);
  Matrix a(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) a(i, j) = 2.0 * rng.uniform() - 1.0;
  Vec b{1.0, -2.0, 0.5, 3.0};
  const Vec x = solve(a, b);
  const Vec ax = matvec(a, x);
  for (std::size_t i = 0; i < 4; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-9));

  const Matrix inv = invert(a);
  const Matrix eye = matmul(a, inv);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::fabs(eye(i, j) - (i == j ? 1.0 : 0.0)) < 1e-9);

  const Matrix q = orthonormalize_columns(a);
  const Matrix g = matmul(transpose(q), q);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::fabs(g(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);

  CHECK(condition_number(Matrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-9));
}
