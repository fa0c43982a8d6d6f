#pragma once

// Dense symmetric linear algebra for the moment pipeline: mean/covariance
// accumulation, cyclic-Jacobi symmetric eigendecomposition, inverse square
// root with an eigenvalue floor, plus the small general-matrix helpers the
// sampler needs (QR orthogonalization, Gauss-Jordan solve).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cmoments {

using Vec = std::vector<double>;

inline double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec normalized(const Vec& x) {
  const double n = norm(x);
  if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
  Vec y(x);
  for (double& v : y) v /= n;
  return y;
}

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t d) {
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix in packed upper-triangular storage; symmetry holds by
/// construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t d) : d_(d), a_(d * (d + 1) / 2, 0.0) {}

  static SymMatrix identity(std::size_t d) {
    SymMatrix m(d);
    for (std::size_t i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return d_; }

  double& at(std::size_t i, std::size_t j) { return a_[index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[index(i, j)]; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < d_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }

  Matrix to_dense() const {
    Matrix m(d_, d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * d_ - i * (i - 1) / 2 + (j - i);
  }

  std::size_t d_ = 0;
  std::vector<double> a_;
};

inline Vec matvec(const SymMatrix& m, const Vec& x) {
  const std::size_t d = m.dim();
  Vec y(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) y[i] += m(i, j) * x[j];
  return y;
}

inline Vec matvec(const Matrix& m, const Vec& x) {
  Vec y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

struct EigenPair {
  double value = 0.0;
  Vec vector;
};

/// Column mean and 1/N covariance of the rows of X.
inline std::pair<Vec, SymMatrix> mean_cov(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 2) throw std::invalid_argument("mean_cov: needs at least 2 rows");
  Vec mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x.row(r);
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  SymMatrix cov(d);
  std::vector<double> centered(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x.row(r);
    for (std::size_t j = 0; j < d; ++j) centered[j] = row[j] - mean[j];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) cov.at(i, j) += centered[i] * centered[j];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) cov.at(i, j) *= inv_n;
  return {std::move(mean), std::move(cov)};
}

/// Full symmetric eigendecomposition via cyclic Jacobi sweeps, sorted by
/// eigenvalue descending.  Eigenvectors are unit length, orthogonal, and
/// sign-fixed so the entry of largest magnitude is positive.
inline std::vector<EigenPair> sym_eigen(const SymMatrix& m) {
  const std::size_t d = m.dim();
  Matrix a = m.to_dense();
  Matrix v = Matrix::identity(d);
  const double norm_f = m.frobenius_norm();
  const double tol = 1e-12 * norm_f;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (norm_f > 0.0 && off_norm() > tol) {
    if (++sweep > 100)
      throw std::runtime_error("sym_eigen: Jacobi failed to converge (numerical failure)");
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          if (k != p && k != q) {
            const double akp = a(k, p), akq = a(k, q);
            a(k, p) = c * akp - s * akq;
            a(p, k) = a(k, p);
            a(k, q) = s * akp + c * akq;
            a(q, k) = a(k, q);
          }
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<EigenPair> pairs(d);
  for (std::size_t j = 0; j < d; ++j) {
    pairs[j].value = a(j, j);
    pairs[j].vector.resize(d);
    for (std::size_t i = 0; i < d; ++i) pairs[j].vector[i] = v(i, j);
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& l, const EigenPair& r) { return l.value > r.value; });
  for (EigenPair& p : pairs) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < d; ++i)
      if (std::fabs(p.vector[i]) > std::fabs(p.vector[imax])) imax = i;
    if (p.vector[imax] < 0.0)
      for (double& e : p.vector) e = -e;
  }
  return pairs;
}

inline EigenPair top_eigenpair(const SymMatrix& m) { return sym_eigen(m).front(); }

/// M^{-1/2} via eigendecomposition, with eigenvalues clamped below at
/// `floor` before inversion so whitening never amplifies numerically-zero
/// directions.
inline SymMatrix inv_sqrt(const SymMatrix& m, double floor) {
  const auto pairs = sym_eigen(m);
  const double lambda_max = pairs.front().value;
  if (!(lambda_max > 0.0))
    throw std::runtime_error("inv_sqrt: degenerate covariance (no positive eigenvalue)");
  const std::size_t d = m.dim();
  SymMatrix out(d);
  for (const EigenPair& p : pairs) {
    const double lam = std::max(p.value, floor);
    const double w = 1.0 / std::sqrt(lam);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) out.at(i, j) += w * p.vector[i] * p.vector[j];
  }
  return out;
}

/// Default eigenvalue floor: 1e-12 * lambda_max.
inline SymMatrix inv_sqrt(const SymMatrix& m) {
  const double lambda_max = top_eigenpair(m).value;
  if (!(lambda_max > 0.0))
    throw std::runtime_error("inv_sqrt: degenerate covariance (no positive eigenvalue)");
  return inv_sqrt(m, 1e-12 * lambda_max);
}

/// Solve A x = b by Gauss-Jordan elimination with partial pivoting.
inline Vec solve(Matrix a, Vec b) {
  const std::size_t d = a.rows();
  if (a.cols() != d || b.size() != d) throw std::invalid_argument("solve: shape mismatch");
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (a(piv, col) == 0.0) throw std::runtime_error("solve: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < d; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    const double inv_p = 1.0 / a(col, col);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a(r, col) * inv_p;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < d; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = b[i] / a(i, i);
  return x;
}

inline Matrix invert(const Matrix& a) {
  const std::size_t d = a.rows();
  Matrix inv(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    Vec e(d, 0.0);
    e[j] = 1.0;
    const Vec col = solve(a, e);
    for (std::size_t i = 0; i < d; ++i) inv(i, j) = col[i];
  }
  return inv;
}

/// Orthonormalizes the columns of a square matrix (modified Gram-Schmidt).
/// Applied to an i.i.d. Gaussian matrix this yields a Haar-random rotation.
inline Matrix orthonormalize_columns(Matrix a) {
  const std::size_t d = a.rows();
  if (a.cols() != d) throw std::invalid_argument("orthonormalize_columns: square input required");
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < d; ++i) proj += a(i, k) * a(i, j);
      for (std::size_t i = 0; i < d; ++i) a(i, j) -= proj * a(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < d; ++i) nrm += a(i, j) * a(i, j);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) throw std::runtime_error("orthonormalize_columns: rank deficient");
    for (std::size_t i = 0; i < d; ++i) a(i, j) /= nrm;
  }
  return a;
}

/// Condition number (ratio of extreme singular values) of a square matrix.
inline double condition_number(const Matrix& a) {
  const std::size_t d = a.rows();
  SymMatrix gram(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a(k, i) * a(k, j);
      gram.at(i, j) = s;
    }
  const auto pairs = sym_eigen(gram);
  const double lo = pairs.back().value;
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(pairs.front().value / lo);
}

}  // namespace cmoments
