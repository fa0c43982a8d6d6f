#pragma once

// Max-margin scan along a direction, selection among candidate directions,
// and the sin-theta evaluation metric.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cmoments/estimator.hpp"
#include "cmoments/linalg.hpp"

namespace cmoments {

/// Widest empty interval among the sorted 1-D projections of the data.
struct MarginReport {
  Vec direction;
  double gap_lo = 0.0;
  double gap_hi = 0.0;
  double width = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

/// Scans the projections of the rows of Y onto `direction` for the widest
/// consecutive gap whose split leaves at least
/// max(1, ceil(min_side_fraction * N)) points on each side.  Raw maximum-gap
/// behaviour is min_side_fraction = 0; the nonzero default elsewhere guards
/// against extreme-order-statistic gaps in the tails.
inline MarginReport max_margin(const Matrix& y, const Vec& direction,
                               double min_side_fraction) {
  const std::size_t n = y.rows();
  if (n < 2) throw std::invalid_argument("max_margin: needs at least 2 rows");
  if (direction.size() != y.cols())
    throw std::invalid_argument("max_margin: direction dimension mismatch");
  if (std::fabs(norm(direction) - 1.0) > 1e-9)
    throw std::invalid_argument("max_margin: direction must be unit length");
  if (!(min_side_fraction >= 0.0 && min_side_fraction < 0.5))
    throw std::invalid_argument("max_margin: min_side_fraction must lie in [0, 0.5)");

  std::vector<double> proj(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = y.row(r);
    double s = 0.0;
    for (std::size_t j = 0; j < direction.size(); ++j) s += row[j] * direction[j];
    proj[r] = s;
  }
  std::sort(proj.begin(), proj.end());

  std::size_t side = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(min_side_fraction * static_cast<double>(n))));
  side = std::min(side, n / 2);  // always leaves a valid split

  MarginReport report;
  report.direction = direction;
  std::size_t best = side - 1;
  double best_width = proj[side] - proj[side - 1];
  for (std::size_t i = side; i + side < n; ++i) {
    const double w = proj[i + 1] - proj[i];
    if (w > best_width) {
      best_width = w;
      best = i;
    }
  }
  report.gap_lo = proj[best];
  report.gap_hi = proj[best + 1];
  report.width = best_width;
  report.left_count = best + 1;
  report.right_count = n - best - 1;
  return report;
}

enum class CandidateKind { Mean1 = 0, Mean2 = 1, Cov = 2 };

inline const char* candidate_kind_name(CandidateKind k) {
  switch (k) {
    case CandidateKind::Mean1: return "mean1";
    case CandidateKind::Mean2: return "mean2";
    case CandidateKind::Cov: return "cov";
  }
  return "?";
}

struct Selection {
  CandidateKind chosen_kind = CandidateKind::Cov;
  Vec chosen;
  // Reports in fixed candidate order (mean1, mean2, cov); empty for flagged
  // candidates.
  std::array<std::optional<MarginReport>, 3> reports;
};

/// Picks the candidate direction with the largest margin on the whitened
/// data.  Ties break by candidate order (mean1, mean2, cov) for determinism.
inline Selection select(const Matrix& y, const CandidateSet& cands,
                        double min_side_fraction) {
  Selection sel;
  const Vec* dirs[3] = {&cands.mu_alpha1, &cands.mu_alpha2, &cands.cov_top.vector};
  const bool valid[3] = {cands.mu1_valid, cands.mu2_valid,
                         !cands.cov_top.vector.empty()};
  double best_width = -1.0;
  int best = -1;
  for (int i = 0; i < 3; ++i) {
    if (!valid[i]) continue;
    sel.reports[i] = max_margin(y, *dirs[i], min_side_fraction);
    if (sel.reports[i]->width > best_width) {
      best_width = sel.reports[i]->width;
      best = i;
    }
  }
  if (best < 0) throw std::runtime_error("select: no unflagged candidate");
  sel.chosen_kind = static_cast<CandidateKind>(best);
  sel.chosen = *dirs[best];
  return sel;
}

/// sin of the angle between u and v; sign-invariant, in [0, 1].
inline double sin_theta(const Vec& u, const Vec& v) {
  const double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0)
    throw std::invalid_argument("sin_theta: zero vector");
  const double c = dot(u, v) / (nu * nv);
  const double cc = std::min(1.0, c * c);
  return std::sqrt(1.0 - cc);
}

}  // namespace cmoments
