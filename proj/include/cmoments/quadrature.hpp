#pragma once

// Adaptive Gauss-Kronrod quadrature on finite intervals.
//
// A 7-point Gauss rule embedded in a 15-point Kronrod rule gives an integral
// estimate plus an error estimate per panel; panels whose error estimate
// exceeds their share of the tolerance budget are bisected.

#include <cmath>
#include <cstddef>
#include <utility>

namespace cmoments {

namespace detail {

// QUADPACK dqk15 abscissae/weights on [-1, 1].  Entries 1, 3, 5 of the node
// table (plus the centre) are the Gauss-7 points.
inline constexpr double kK15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr double kK15Weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// One Kronrod panel: returns {K15 estimate, |K15 - G7| error estimate}.
template <class F>
std::pair<double, double> kronrod_panel(const F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(mid);
  double result_k = kK15Weights[7] * fc;
  double result_g = kG7Weights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kK15Nodes[j];
    const double fsum = f(mid - dx) + f(mid + dx);
    result_k += kK15Weights[j] * fsum;
    if (j % 2 == 1) result_g += kG7Weights[(j - 1) / 2] * fsum;
  }
  result_k *= half;
  result_g *= half;
  return {result_k, std::fabs(result_k - result_g)};
}

template <class F>
double integrate_panel(const F& f, double lo, double hi, double abs_tol,
                       int depth) {
  const auto [estimate, err] = kronrod_panel(f, lo, hi);
  // Depth 48 shrinks a panel by 2^-48; any bounded jump contributes less
  // than the tolerance at that width.
  if (err <= abs_tol || depth >= 48) return estimate;
  const double mid = 0.5 * (lo + hi);
  return integrate_panel(f, lo, mid, 0.5 * abs_tol, depth + 1) +
         integrate_panel(f, mid, hi, 0.5 * abs_tol, depth + 1);
}

}  // namespace detail

/// Integrates f over [lo, hi] to absolute tolerance abs_tol.
template <class F>
double integrate(const F& f, double lo, double hi, double abs_tol = 1e-10) {
  if (!(lo < hi)) return 0.0;
  return detail::integrate_panel(f, lo, hi, abs_tol, 0);
}

}  // namespace cmoments
