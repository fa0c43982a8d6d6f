#pragma once

// One-dimensional symmetric isotropic logconcave densities (Gaussian,
// Uniform, Laplace) and their band truncations: density/CDF/quantile,
// upper-tail moments, truncation statistics and inverse-CDF sampling from
// the complement of a removed band [a, b].
//
// All three families are parameterized to zero mean and unit variance:
// Gaussian with sigma 1, Uniform on [-sqrt(3), sqrt(3)], Laplace with
// scale 1/sqrt(2).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cmoments/quadrature.hpp"
#include "cmoments/rng.hpp"

namespace cmoments {

enum class Family { Gaussian, Uniform, Laplace };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::Uniform: return "uniform";
    case Family::Laplace: return "laplace";
  }
  return "?";
}

struct DensityModel {
  Family family = Family::Gaussian;
};

namespace detail {

inline constexpr double kSqrt3 = 1.7320508075688772;        // uniform half-width
inline constexpr double kLaplaceScale = 0.7071067811865476; // 1/sqrt(2)
inline constexpr double kInvSqrt2Pi = 0.3989422804014327;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865476);
}

// Acklam's rational approximation for the standard normal quantile,
// polished with one Halley step (final error near machine epsilon).
inline double normal_quantile(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e / normal_pdf(x);
  return x - u / (1.0 + 0.5 * x * u);
}

// Upper-tail moment of the unit-variance Laplace density restricted to
// [u, inf) for u >= 0: (s^k/2) * k! * exp(-u/s) * sum_{j<=k} (u/s)^j / j!.
inline double laplace_half_upper_moment(int k, double u) {
  const double s = kLaplaceScale;
  const double z = u / s;
  double term = 1.0;  // z^j / j!
  double sum = 1.0;
  for (int j = 1; j <= k; ++j) {
    term *= z / j;
    sum += term;
  }
  double fact = 1.0;
  for (int j = 2; j <= k; ++j) fact *= j;
  return 0.5 * std::pow(s, k) * fact * std::exp(-z) * sum;
}

}  // namespace detail

/// Half-width of the support; +inf for the unbounded families.
inline double support_radius(const DensityModel& m) {
  return m.family == Family::Uniform ? detail::kSqrt3
                                     : std::numeric_limits<double>::infinity();
}

/// Cutoff beyond which total remaining mass (with polynomial weights up to
/// x^8) is below 1e-13; used as the quadrature window.
inline double integration_radius(const DensityModel& m) {
  switch (m.family) {
    case Family::Gaussian: return 12.0;
    case Family::Uniform: return detail::kSqrt3;
    case Family::Laplace: return 34.0;
  }
  return 34.0;
}

inline double pdf(const DensityModel& m, double x) {
  switch (m.family) {
    case Family::Gaussian:
      return detail::normal_pdf(x);
    case Family::Uniform:
      return std::fabs(x) <= detail::kSqrt3 ? 1.0 / (2.0 * detail::kSqrt3) : 0.0;
    case Family::Laplace:
      return std::exp(-std::fabs(x) / detail::kLaplaceScale) /
             (2.0 * detail::kLaplaceScale);
  }
  return 0.0;
}

inline double cdf(const DensityModel& m, double x) {
  switch (m.family) {
    case Family::Gaussian:
      return detail::normal_cdf(x);
    case Family::Uniform: {
      if (x <= -detail::kSqrt3) return 0.0;
      if (x >= detail::kSqrt3) return 1.0;
      return (x + detail::kSqrt3) / (2.0 * detail::kSqrt3);
    }
    case Family::Laplace:
      return x < 0.0 ? 0.5 * std::exp(x / detail::kLaplaceScale)
                     : 1.0 - 0.5 * std::exp(-x / detail::kLaplaceScale);
  }
  return 0.0;
}

inline double quantile(const DensityModel& m, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("quantile: p must lie in (0, 1)");
  switch (m.family) {
    case Family::Gaussian:
      return detail::normal_quantile(p);
    case Family::Uniform:
      return -detail::kSqrt3 + 2.0 * detail::kSqrt3 * p;
    case Family::Laplace:
      return p < 0.5 ? detail::kLaplaceScale * std::log(2.0 * p)
                     : -detail::kLaplaceScale * std::log(2.0 * (1.0 - p));
  }
  return 0.0;
}

/// Upper-tail moment M_k(t) = integral over [t, inf) of x^k q(x) dx.
/// Closed forms for Gaussian and Laplace; quadrature for Uniform.
inline double truncated_moment(const DensityModel& m, int k, double t) {
  if (k < 0 || k > 8)
    throw std::domain_error("truncated_moment: order must be in [0, 8]");
  switch (m.family) {
    case Family::Gaussian: {
      // M_0 = 1 - Phi(t), M_1 = phi(t), M_k = t^{k-1} phi(t) + (k-1) M_{k-2}.
      if (k == 0) return 0.5 * std::erfc(t * 0.7071067811865476);
      if (k == 1) return detail::normal_pdf(t);
      return std::pow(t, k - 1) * detail::normal_pdf(t) +
             (k - 1) * truncated_moment(m, k - 2, t);
    }
    case Family::Uniform: {
      const double hi = detail::kSqrt3;
      const double lo = std::max(t, -hi);
      if (lo >= hi) return 0.0;
      return integrate([&](double x) { return std::pow(x, k) * pdf(m, x); }, lo,
                       hi, 1e-12);
    }
    case Family::Laplace: {
      if (t >= 0.0) return detail::laplace_half_upper_moment(k, t);
      const double whole = detail::laplace_half_upper_moment(k, 0.0);
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      return whole * (1.0 + sign) -
             sign * detail::laplace_half_upper_moment(k, -t);
    }
  }
  return 0.0;
}

/// Removed band [a, b] with derived truncation statistics: the band mass,
/// the two tail masses, and the mean/variance of q restricted to the
/// complement of the band.
struct BandSpec {
  double a = 0.0;
  double b = 0.0;
  double mass = 0.0;
  double left_tail = 0.0;
  double right_tail = 0.0;
  double mu1 = 0.0;
  double sigma1_sq = 0.0;
};

inline BandSpec band_stats(const DensityModel& m, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("band_stats: requires a < b");
  BandSpec band;
  band.a = a;
  band.b = b;
  band.left_tail = cdf(m, a);
  band.right_tail = 1.0 - cdf(m, b);
  band.mass = cdf(m, b) - cdf(m, a);
  const double kept = 1.0 - band.mass;
  if (kept <= 1e-12)
    throw std::runtime_error("band_stats: degenerate band swallows all mass");
  // The band's own first moment; the complement's moment is its negation.
  const double band_first = truncated_moment(m, 1, a) - truncated_moment(m, 1, b);
  band.mu1 = (a == -b) ? 0.0 : -band_first / kept;
  const double second_outside =
      1.0 - (truncated_moment(m, 2, a) - truncated_moment(m, 2, b));
  band.sigma1_sq = second_outside / kept - band.mu1 * band.mu1;
  return band;
}

/// Admissibility of a band at a given margin parameter (each tail and the
/// band itself must carry mass at least epsilon).
struct EpsilonCheck {
  double epsilon = 0.0;
  bool satisfied = false;
};

inline EpsilonCheck epsilon_check(const BandSpec& band, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("epsilon_check: epsilon must lie in (0, 1)");
  EpsilonCheck chk;
  chk.epsilon = epsilon;
  chk.satisfied = std::min({band.left_tail, band.mass, band.right_tail}) >= epsilon;
  return chk;
}

/// Draws from q restricted to the complement of (a, b) by inverse CDF:
/// a single uniform picks the tail (with probability proportional to tail
/// mass) and the position within it.  Output is never inside (a, b).
inline double sample_truncated(const DensityModel& m, const BandSpec& band,
                               SplitMix64& rng) {
  const double tails = band.left_tail + band.right_tail;
  const double p = rng.uniform() * tails;
  if (p <= band.left_tail) return quantile(m, p);
  // mass + p < 1 mathematically; the sum may still round up to 1.
  const double q = std::min(band.mass + p, std::nextafter(1.0, 0.0));
  return quantile(m, q);
}

/// CDF of the truncated (non-standardized) law; used by goodness-of-fit
/// tests against empirical samples.
inline double truncated_cdf(const DensityModel& m, const BandSpec& band,
                            double x) {
  const double kept = band.left_tail + band.right_tail;
  if (x <= band.a) return cdf(m, x) / kept;
  if (x < band.b) return band.left_tail / kept;
  return (band.left_tail + (cdf(m, x) - (band.left_tail + band.mass))) / kept;
}

}  // namespace cmoments
