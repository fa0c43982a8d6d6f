#pragma once

// The moment pipeline: whitening, re-weighted first and second moments with
// weight w(y, alpha) = exp(alpha * |y|^2), and candidate direction
// extraction.  With alpha <= 0 every weight lies in (0, 1], so the sums are
// overflow-free by construction.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "cmoments/linalg.hpp"

namespace cmoments {

/// Re-weighting exponents.  Defaults are the constants that work at
/// practical sample sizes; the tiny theoretical values remain reachable.
struct AlphaConfig {
  double alpha1 = -0.1;
  double alpha2 = -0.2;
  double alpha3 = -0.1;

  void validate() const {
    if (!(alpha1 < 0.0 && alpha2 < 0.0 && alpha3 < 0.0))
      throw std::domain_error("AlphaConfig: all alphas must be strictly negative");
    if (alpha1 == alpha2)
      throw std::domain_error("AlphaConfig: alpha1 and alpha2 must be distinct");
  }
};

/// The affine map y = transform * (x - mean) that makes data isotropic.
struct Whitener {
  SymMatrix transform;
  Vec mean;
};

inline Matrix apply_whitener(const Whitener& w, const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  Matrix y(n, d);
  Vec centered(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = x.row(r);
    for (std::size_t j = 0; j < d; ++j) centered[j] = xr[j] - w.mean[j];
    double* yr = y.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += w.transform(i, j) * centered[j];
      yr[i] = s;
    }
  }
  return y;
}

/// Centers and decorrelates the rows of X: Y = cov^{-1/2} (x - mean).
inline std::pair<Matrix, Whitener> whiten(const Matrix& x) {
  if (x.rows() < x.cols() + 1)
    throw std::invalid_argument("whiten: needs at least d + 1 rows");
  auto [mean, cov] = mean_cov(x);
  Whitener w{inv_sqrt(cov), std::move(mean)};
  Matrix y = apply_whitener(w, x);
  return {std::move(y), std::move(w)};
}

/// (1/N) sum_j exp(alpha |y_j|^2) y_j.
inline Vec reweighted_mean(const Matrix& y, double alpha) {
  if (alpha > 0.0)
    throw std::domain_error("reweighted_mean: alpha must be <= 0");
  const std::size_t n = y.rows(), d = y.cols();
  Vec acc(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* yr = y.row(r);
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += yr[j] * yr[j];
    const double w = std::exp(alpha * sq);
    for (std::size_t j = 0; j < d; ++j) acc[j] += w * yr[j];
  }
  for (double& v : acc) v /= static_cast<double>(n);
  return acc;
}

/// (1/N) sum_j exp(alpha |y_j|^2) y_j y_j^T; PSD as a nonnegative mix of
/// rank-one terms.
inline SymMatrix reweighted_uncentered_cov(const Matrix& y, double alpha) {
  if (alpha > 0.0)
    throw std::domain_error("reweighted_uncentered_cov: alpha must be <= 0");
  const std::size_t n = y.rows(), d = y.cols();
  SymMatrix acc(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double* yr = y.row(r);
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += yr[j] * yr[j];
    const double w = std::exp(alpha * sq);
    for (std::size_t i = 0; i < d; ++i) {
      const double wyi = w * yr[i];
      for (std::size_t j = i; j < d; ++j) acc.at(i, j) += wyi * yr[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) acc.at(i, j) *= inv_n;
  return acc;
}

/// The three candidate directions of the general algorithm.  A re-weighted
/// mean whose norm is numerically zero (possible for perfectly symmetric
/// point sets) is flagged instead of normalized.
struct CandidateSet {
  Vec mu_alpha1;
  Vec mu_alpha2;
  bool mu1_valid = false;
  bool mu2_valid = false;
  EigenPair cov_top;
  double cov_gap = 0.0;  // top-two eigenvalue gap of the re-weighted covariance
  Whitener whitener;
};

inline CandidateSet candidates(const Matrix& x, const AlphaConfig& cfg) {
  cfg.validate();
  auto [y, w] = whiten(x);
  CandidateSet out;
  out.whitener = std::move(w);

  constexpr double kZeroNorm = 1e-12;
  Vec m1 = reweighted_mean(y, cfg.alpha1);
  Vec m2 = reweighted_mean(y, cfg.alpha2);
  if (norm(m1) > kZeroNorm) {
    out.mu_alpha1 = normalized(m1);
    out.mu1_valid = true;
  }
  if (norm(m2) > kZeroNorm) {
    out.mu_alpha2 = normalized(m2);
    out.mu2_valid = true;
  }

  const SymMatrix rw_cov = reweighted_uncentered_cov(y, cfg.alpha3);
  auto pairs = sym_eigen(rw_cov);
  out.cov_top = std::move(pairs.front());
  out.cov_gap = pairs.size() > 1 ? pairs[0].value - pairs[1].value : pairs[0].value;
  return out;
}

/// The no-whitening path for data that is already isotropic per component:
/// plain sample mean plus the top eigenpair of the uncentered second-moment
/// matrix.
struct IsotropicCandidates {
  Vec mean;
  EigenPair cov_top;
  double cov_gap = 0.0;
};

inline IsotropicCandidates isotropic_candidates(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 2) throw std::invalid_argument("isotropic_candidates: needs at least 2 rows");
  IsotropicCandidates out;
  out.mean.assign(d, 0.0);
  SymMatrix second(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = x.row(r);
    for (std::size_t j = 0; j < d; ++j) out.mean[j] += xr[j];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) second.at(i, j) += xr[i] * xr[j];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : out.mean) v *= inv_n;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) second.at(i, j) *= inv_n;
  auto pairs = sym_eigen(second);
  out.cov_top = std::move(pairs.front());
  out.cov_gap = pairs.size() > 1 ? pairs[0].value - pairs[1].value : pairs[0].value;
  return out;
}

}  // namespace cmoments
