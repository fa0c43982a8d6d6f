#pragma once

// Sweep harness: single recovery trials, (a, b) grid heatmaps, dimension
// and margin-mass sweeps, the mean-vs-covariance comparison, and the
// lemma-verification entry point.  Every output row derives from
// (configuration, seed) alone, so repeated runs are byte-identical; trials
// are distributed over a worker pool with per-trial seeds derived from the
// master seed, which keeps parallel execution deterministic.  Trial seeds
// are shared across sweep cells (common random numbers), so cross-cell
// trend comparisons cancel most of the sampling noise.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cmoments/density.hpp"
#include "cmoments/estimator.hpp"
#include "cmoments/margin.hpp"
#include "cmoments/oracle.hpp"
#include "cmoments/sampler.hpp"
#include "cmoments/svg.hpp"

namespace cmoments {

// ---------------------------------------------------------------------------
// Shared helpers.

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell,
                                std::uint64_t trial) {
  return mix64(mix64(master + 0x9E3779B97F4A7C15ull * (cell + 1)) +
               0x9E3779B97F4A7C15ull * (trial + 1));
}

inline double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Half-width h such that the symmetric band (-h, h) carries the requested
/// mass, by bisection on the CDF.
inline double symmetric_half_width_for_mass(const DensityModel& m, double mass) {
  if (!(mass > 0.0 && mass < 1.0))
    throw std::domain_error("symmetric_half_width_for_mass: mass must lie in (0, 1)");
  double lo = 0.0, hi = support_radius(m);
  if (!std::isfinite(hi)) hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double got = cdf(m, mid) - cdf(m, -mid);
    (got < mass ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Runs fn(0..count-1) on `threads` workers.  Tasks write results into
/// index-addressed slots, so scheduling never affects output.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(count));
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
    });
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Single trials.

/// End-to-end output of one recovery: the candidate directions, margin
/// reports, the selection, and the angles against the hidden normal
/// (measured in whitened coordinates).
struct RecoveryResult {
  CandidateSet cands;
  Selection selection;
  Vec true_direction;  // hidden normal mapped into whitened coordinates
  double sin_theta_mean1 = std::numeric_limits<double>::quiet_NaN();
  double sin_theta_mean2 = std::numeric_limits<double>::quiet_NaN();
  double sin_theta_cov = std::numeric_limits<double>::quiet_NaN();
  double sin_theta_selected = std::numeric_limits<double>::quiet_NaN();
};

/// The hidden band normal expressed in whitened coordinates: the gradient
/// of the banded coordinate z1 as a function of y, i.e. the solution of
/// (A^T W) n = u.
inline Vec true_normal_whitened(const MarginInstance& inst, const Whitener& w) {
  const Matrix m = matmul(transpose(inst.affine), w.transform.to_dense());
  return normalized(solve(m, inst.u));
}

inline RecoveryResult recover(const Matrix& x, const MarginInstance& inst,
                              const AlphaConfig& alphas, double min_side_fraction) {
  RecoveryResult res;
  res.cands = candidates(x, alphas);
  const Matrix y = apply_whitener(res.cands.whitener, x);
  res.selection = select(y, res.cands, min_side_fraction);
  res.true_direction = true_normal_whitened(inst, res.cands.whitener);
  if (res.cands.mu1_valid)
    res.sin_theta_mean1 = sin_theta(res.true_direction, res.cands.mu_alpha1);
  if (res.cands.mu2_valid)
    res.sin_theta_mean2 = sin_theta(res.true_direction, res.cands.mu_alpha2);
  res.sin_theta_cov = sin_theta(res.true_direction, res.cands.cov_top.vector);
  res.sin_theta_selected = sin_theta(res.true_direction, res.selection.chosen);
  return res;
}

struct TrialRecord {
  Family family = Family::Gaussian;
  double a = 0.0, b = 0.0;
  std::size_t d = 0, n = 0;
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
  AffineMode affine_mode = AffineMode::Identity;
  std::uint64_t seed = 0;
  double sin_theta_mean1 = std::numeric_limits<double>::quiet_NaN();
  double sin_theta_mean2 = std::numeric_limits<double>::quiet_NaN();
  double sin_theta_cov = std::numeric_limits<double>::quiet_NaN();
  double sin_theta_selected = std::numeric_limits<double>::quiet_NaN();
  CandidateKind selected_kind = CandidateKind::Cov;
  double margin_width_mean1 = std::numeric_limits<double>::quiet_NaN();
  double margin_width_mean2 = std::numeric_limits<double>::quiet_NaN();
  double margin_width_cov = std::numeric_limits<double>::quiet_NaN();
  double elapsed_ms = 0.0;

  /// The better of the two contrastive-mean angles.
  double sin_theta_best_mean() const {
    if (std::isnan(sin_theta_mean1)) return sin_theta_mean2;
    if (std::isnan(sin_theta_mean2)) return sin_theta_mean1;
    return std::min(sin_theta_mean1, sin_theta_mean2);
  }
};

struct TrialConfig {
  AlphaConfig alphas;
  double min_side_fraction = 0.05;
};

inline TrialRecord run_trial(const MarginInstance& inst, std::size_t n,
                             const TrialConfig& cfg, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.family = inst.model.family;
  rec.a = inst.band.a;
  rec.b = inst.band.b;
  rec.d = inst.d;
  rec.n = n;
  rec.alpha1 = cfg.alphas.alpha1;
  rec.alpha2 = cfg.alphas.alpha2;
  rec.alpha3 = cfg.alphas.alpha3;
  rec.affine_mode = inst.mode;
  rec.seed = seed;

  const Dataset ds = generate(inst, n, seed);
  const RecoveryResult res = recover(ds.x, inst, cfg.alphas, cfg.min_side_fraction);

  rec.sin_theta_mean1 = res.sin_theta_mean1;
  rec.sin_theta_mean2 = res.sin_theta_mean2;
  rec.sin_theta_cov = res.sin_theta_cov;
  rec.sin_theta_selected = res.sin_theta_selected;
  rec.selected_kind = res.selection.chosen_kind;
  if (res.selection.reports[0]) rec.margin_width_mean1 = res.selection.reports[0]->width;
  if (res.selection.reports[1]) rec.margin_width_mean2 = res.selection.reports[1]->width;
  if (res.selection.reports[2]) rec.margin_width_cov = res.selection.reports[2]->width;
  rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return rec;
}

// ---------------------------------------------------------------------------
// Trial CSV.

/// Wall-clock is excluded by default so the files reproduce byte-identically
/// from (config, seed); pass include_timing for profiling runs.
inline std::string trial_csv_header(bool include_timing = false) {
  std::string h =
      "family,a,b,d,N,alpha1,alpha2,alpha3,affine_mode,seed,"
      "sin_theta_mean1,sin_theta_mean2,sin_theta_cov,sin_theta_selected,"
      "selected_kind,margin_width_mean1,margin_width_mean2,margin_width_cov";
  if (include_timing) h += ",elapsed_ms";
  return h;
}

inline std::string trial_csv_row(const TrialRecord& r, bool include_timing = false) {
  std::string line = family_name(r.family);
  auto add = [&line](double v) {
    line += ',';
    detail::format_double(line, v);
  };
  add(r.a);
  add(r.b);
  line += ',' + std::to_string(r.d);
  line += ',' + std::to_string(r.n);
  add(r.alpha1);
  add(r.alpha2);
  add(r.alpha3);
  line += ',';
  line += affine_mode_name(r.affine_mode);
  line += ',' + std::to_string(r.seed);
  add(r.sin_theta_mean1);
  add(r.sin_theta_mean2);
  add(r.sin_theta_cov);
  add(r.sin_theta_selected);
  line += ',';
  line += candidate_kind_name(r.selected_kind);
  add(r.margin_width_mean1);
  add(r.margin_width_mean2);
  add(r.margin_width_cov);
  if (include_timing) add(r.elapsed_ms);
  return line;
}

inline void write_trial_csv(const std::string& path,
                            const std::vector<TrialRecord>& records,
                            bool include_timing = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_trial_csv: cannot open " + path);
  out << trial_csv_header(include_timing) << '\n';
  for (const TrialRecord& r : records) out << trial_csv_row(r, include_timing) << '\n';
}

/// Cells or trials that could not run (inadmissible band, numerical
/// failure) are recorded separately with the reason.
struct SkipRecord {
  Family family = Family::Gaussian;
  double a = 0.0, b = 0.0;
  std::string reason;
};

inline void write_skip_csv(const std::string& path, const std::vector<SkipRecord>& skips) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_skip_csv: cannot open " + path);
  out << "family,a,b,reason\n";
  for (const SkipRecord& s : skips) {
    std::string line = family_name(s.family);
    line += ',';
    detail::format_double(line, s.a);
    line += ',';
    detail::format_double(line, s.b);
    line += ',';
    line += s.reason;
    out << line << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepConfig {
  DensityModel model;
  std::size_t d = 10;
  std::size_t n = 200000;
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  TrialConfig trial;
  AffineMode affine_mode = AffineMode::RandomRotation;
  double kappa_max = 10.0;
  double epsilon = 0.01;
  unsigned threads = 1;
  bool include_timing = false;
  std::string out_dir = ".";

  // grid sweep
  double grid_min = -3.0;
  double grid_max = 3.0;
  double grid_step = 0.25;

  // dimension sweep
  std::vector<std::size_t> dims = {5, 10, 20, 40};
  double band_a = -0.5;
  double band_b = 0.5;

  // margin-mass sweep
  std::vector<double> mass_targets = {0.05, 0.1, 0.2, 0.3, 0.4};

  // mean-vs-covariance comparison
  double compare_a = -2.0;
  std::vector<double> compare_bs;
};

namespace detail {

struct TrialTask {
  MarginInstance instance;
  std::uint64_t seed = 0;
  std::size_t group = 0;  // which cell / sweep point the trial belongs to
};

// Runs all tasks over the worker pool; failed trials land in `skips`.
inline std::vector<std::optional<TrialRecord>> run_tasks(
    const std::vector<TrialTask>& tasks, std::size_t n, const TrialConfig& cfg,
    unsigned threads, std::vector<SkipRecord>& skips) {
  std::vector<std::optional<TrialRecord>> out(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    try {
      out[i] = run_trial(tasks[i].instance, n, cfg, tasks[i].seed);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (!out[i] && !errors[i].empty())
      skips.push_back({tasks[i].instance.model.family, tasks[i].instance.band.a,
                       tasks[i].instance.band.b, std::string("failed: ") + errors[i]});
  return out;
}

inline void append_group_medians(const std::vector<std::optional<TrialRecord>>& recs,
                                 const std::vector<TrialTask>& tasks, std::size_t group,
                                 std::vector<double>& selected, std::vector<double>& best_mean,
                                 std::vector<double>& cov) {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].group != group || !recs[i]) continue;
    selected.push_back(recs[i]->sin_theta_selected);
    best_mean.push_back(recs[i]->sin_theta_best_mean());
    cov.push_back(recs[i]->sin_theta_cov);
  }
}

}  // namespace detail

struct GridCellSummary {
  double a = 0.0, b = 0.0;
  double median_sin_theta = std::numeric_limits<double>::quiet_NaN();
};

/// Grid sweep over (a, b) pairs; cells failing the admissibility check are
/// recorded as skipped.  Writes the trial table, the skip table, and a
/// heatmap of per-cell medians.
inline std::vector<GridCellSummary> sweep_grid(const SweepConfig& cfg) {
  std::vector<double> axis;
  for (double v = cfg.grid_min; v <= cfg.grid_max + 1e-12; v += cfg.grid_step)
    axis.push_back(v);

  std::vector<SkipRecord> skips;
  std::vector<detail::TrialTask> tasks;
  std::vector<GridCellSummary> cells;
  for (double a : axis) {
    for (double b : axis) {
      if (!(a < b)) continue;
      GridCellSummary cell;
      cell.a = a;
      cell.b = b;
      try {
        SplitMix64 irng(trial_seed(cfg.seed, 0, 0) ^ 0x5bf03635ull);
        InstanceOptions opts{cfg.affine_mode, cfg.kappa_max};
        const MarginInstance inst =
            make_instance(cfg.model, a, b, cfg.d, cfg.epsilon, opts, irng);
        for (std::size_t t = 0; t < cfg.trials; ++t)
          tasks.push_back({inst, trial_seed(cfg.seed, 0, t + 1), cells.size()});
      } catch (const InadmissibleBandError&) {
        skips.push_back({cfg.model.family, a, b, "epsilon-check"});
        cells.push_back(cell);
        continue;
      }
      cells.push_back(cell);
    }
  }

  auto recs = detail::run_tasks(tasks, cfg.n, cfg.trial, cfg.threads, skips);
  std::vector<TrialRecord> flat;
  for (std::size_t g = 0; g < cells.size(); ++g) {
    std::vector<double> sel, bm, cov;
    detail::append_group_medians(recs, tasks, g, sel, bm, cov);
    if (!sel.empty()) cells[g].median_sin_theta = median(sel);
  }
  for (const auto& r : recs)
    if (r) flat.push_back(*r);

  write_trial_csv(cfg.out_dir + "/grid_trials.csv", flat, cfg.include_timing);
  write_skip_csv(cfg.out_dir + "/grid_skipped.csv", skips);

  std::vector<std::vector<double>> heat(axis.size(),
                                        std::vector<double>(axis.size(),
                                                            std::numeric_limits<double>::quiet_NaN()));
  for (const GridCellSummary& c : cells) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (std::fabs(axis[i] - c.a) < 1e-9) ia = i;
      if (std::fabs(axis[i] - c.b) < 1e-9) ib = i;
    }
    heat[ia][ib] = c.median_sin_theta;
  }
  write_heatmap_svg(cfg.out_dir + "/grid_heatmap.svg",
                    std::string("median sin-theta, ") + family_name(cfg.model.family),
                    axis, axis, heat, "a", "b");
  return cells;
}

struct SweepPointSummary {
  double x = 0.0;  // dimension, inverse mass, or right endpoint
  double median_selected = std::numeric_limits<double>::quiet_NaN();
  double median_best_mean = std::numeric_limits<double>::quiet_NaN();
  double median_cov = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline void write_summary_csv(const std::string& path, const std::string& x_name,
                              const std::vector<SweepPointSummary>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
  out << x_name << ",median_sin_theta_selected,median_sin_theta_best_mean,median_sin_theta_cov\n";
  for (const auto& p : points) {
    std::string line;
    format_double(line, p.x);
    line += ',';
    format_double(line, p.median_selected);
    line += ',';
    format_double(line, p.median_best_mean);
    line += ',';
    format_double(line, p.median_cov);
    out << line << '\n';
  }
}

inline std::vector<SweepPointSummary> summarize_groups(
    const std::vector<std::optional<TrialRecord>>& recs,
    const std::vector<TrialTask>& tasks, const std::vector<double>& xs) {
  std::vector<SweepPointSummary> points(xs.size());
  for (std::size_t g = 0; g < xs.size(); ++g) {
    points[g].x = xs[g];
    std::vector<double> sel, bm, cov;
    append_group_medians(recs, tasks, g, sel, bm, cov);
    if (!sel.empty()) {
      points[g].median_selected = median(sel);
      points[g].median_best_mean = median(bm);
      points[g].median_cov = median(cov);
    }
  }
  return points;
}

}  // namespace detail

/// Fixed N, dimension varied; one band per config.
inline std::vector<SweepPointSummary> sweep_dimension(const SweepConfig& cfg) {
  std::vector<SkipRecord> skips;
  std::vector<detail::TrialTask> tasks;
  std::vector<double> xs;
  for (std::size_t gi = 0; gi < cfg.dims.size(); ++gi) {
    const std::size_t d = cfg.dims[gi];
    xs.push_back(static_cast<double>(d));
    SplitMix64 irng(trial_seed(cfg.seed, 0, 0) ^ 0x7b1cull);
    InstanceOptions opts{cfg.affine_mode, cfg.kappa_max};
    const MarginInstance inst =
        make_instance(cfg.model, cfg.band_a, cfg.band_b, d, cfg.epsilon, opts, irng);
    for (std::size_t t = 0; t < cfg.trials; ++t)
      tasks.push_back({inst, trial_seed(cfg.seed, 0, t + 1), gi});
  }
  auto recs = detail::run_tasks(tasks, cfg.n, cfg.trial, cfg.threads, skips);
  auto points = detail::summarize_groups(recs, tasks, xs);

  std::vector<TrialRecord> flat;
  for (const auto& r : recs)
    if (r) flat.push_back(*r);
  write_trial_csv(cfg.out_dir + "/dimension_trials.csv", flat, cfg.include_timing);
  write_skip_csv(cfg.out_dir + "/dimension_skipped.csv", skips);
  detail::write_summary_csv(cfg.out_dir + "/dimension.csv", "d", points);

  LineSeries series{"selected", "#2166ac", {}, {}};
  for (const auto& p : points) {
    series.x.push_back(p.x);
    series.y.push_back(p.median_selected);
  }
  write_line_chart_svg(cfg.out_dir + "/dimension.svg",
                       std::string("median sin-theta vs dimension, ") +
                           family_name(cfg.model.family),
                       {series}, "d", "sin-theta");
  return points;
}

/// Symmetric bands hitting the requested mass targets; x-axis is 1/mass.
inline std::vector<SweepPointSummary> sweep_epsilon(const SweepConfig& cfg) {
  std::vector<SkipRecord> skips;
  std::vector<detail::TrialTask> tasks;
  std::vector<double> xs;
  for (std::size_t gi = 0; gi < cfg.mass_targets.size(); ++gi) {
    const double mass = cfg.mass_targets[gi];
    xs.push_back(1.0 / mass);
    const double h = symmetric_half_width_for_mass(cfg.model, mass);
    SplitMix64 irng(trial_seed(cfg.seed, 0, 0) ^ 0x40e9ull);
    InstanceOptions opts{cfg.affine_mode, cfg.kappa_max};
    const MarginInstance inst =
        make_instance(cfg.model, -h, h, cfg.d, cfg.epsilon, opts, irng);
    for (std::size_t t = 0; t < cfg.trials; ++t)
      tasks.push_back({inst, trial_seed(cfg.seed, 0, t + 1), gi});
  }
  auto recs = detail::run_tasks(tasks, cfg.n, cfg.trial, cfg.threads, skips);
  auto points = detail::summarize_groups(recs, tasks, xs);

  std::vector<TrialRecord> flat;
  for (const auto& r : recs)
    if (r) flat.push_back(*r);
  write_trial_csv(cfg.out_dir + "/epsilon_trials.csv", flat, cfg.include_timing);
  write_skip_csv(cfg.out_dir + "/epsilon_skipped.csv", skips);
  detail::write_summary_csv(cfg.out_dir + "/epsilon.csv", "inv_mass", points);

  LineSeries series{"selected", "#2166ac", {}, {}};
  for (const auto& p : points) {
    series.x.push_back(p.x);
    series.y.push_back(p.median_selected);
  }
  write_line_chart_svg(cfg.out_dir + "/epsilon.svg",
                       std::string("median sin-theta vs 1/mass, ") +
                           family_name(cfg.model.family),
                       {series}, "1/mass", "sin-theta");
  return points;
}

/// Left endpoint fixed, right endpoint swept; emits both the best-mean and
/// the covariance curves.
inline std::vector<SweepPointSummary> compare_mean_cov(const SweepConfig& cfg) {
  std::vector<double> bs = cfg.compare_bs;
  if (bs.empty()) {
    const double lo = cfg.compare_a + 0.1;
    const double hi = cfg.model.family == Family::Uniform ? 0.9 : 4.0;
    for (double b = lo; b <= hi + 1e-12; b += 0.25) bs.push_back(b);
  }
  std::vector<SkipRecord> skips;
  std::vector<detail::TrialTask> tasks;
  std::vector<double> xs;
  for (std::size_t gi = 0; gi < bs.size(); ++gi) {
    xs.push_back(bs[gi]);
    try {
      SplitMix64 irng(trial_seed(cfg.seed, 0, 0) ^ 0x90c3ull);
      InstanceOptions opts{cfg.affine_mode, cfg.kappa_max};
      const MarginInstance inst =
          make_instance(cfg.model, cfg.compare_a, bs[gi], cfg.d, cfg.epsilon, opts, irng);
      for (std::size_t t = 0; t < cfg.trials; ++t)
        tasks.push_back({inst, trial_seed(cfg.seed, 0, t + 1), gi});
    } catch (const InadmissibleBandError&) {
      skips.push_back({cfg.model.family, cfg.compare_a, bs[gi], "epsilon-check"});
    }
  }
  auto recs = detail::run_tasks(tasks, cfg.n, cfg.trial, cfg.threads, skips);
  auto points = detail::summarize_groups(recs, tasks, xs);

  std::vector<TrialRecord> flat;
  for (const auto& r : recs)
    if (r) flat.push_back(*r);
  write_trial_csv(cfg.out_dir + "/compare_trials.csv", flat, cfg.include_timing);
  write_skip_csv(cfg.out_dir + "/compare_skipped.csv", skips);
  detail::write_summary_csv(cfg.out_dir + "/compare.csv", "b", points);

  LineSeries mean_series{"best mean", "#2166ac", {}, {}};
  LineSeries cov_series{"covariance", "#d6a21a", {}, {}};
  for (const auto& p : points) {
    mean_series.x.push_back(p.x);
    mean_series.y.push_back(p.median_best_mean);
    cov_series.x.push_back(p.x);
    cov_series.y.push_back(p.median_cov);
  }
  write_line_chart_svg(cfg.out_dir + "/compare.svg",
                       std::string("mean vs covariance, a=") +
                           detail::svg_num(cfg.compare_a) + ", " +
                           family_name(cfg.model.family),
                       {mean_series, cov_series}, "b", "sin-theta");
  return points;
}

// ---------------------------------------------------------------------------
// Lemma verification.

/// Runs the oracle catalog: moment-ratio monotonicity for both half-line
/// families, exponential-tail positivity, sign-change counts of the
/// re-weighted mean over a band catalog, and positivity of the spectral-gap
/// statistic for symmetric bands.  Returns all reports; overall success is
/// the conjunction of verdicts.
inline std::vector<LemmaReport> verify_lemmas() {
  std::vector<LemmaReport> reports;

  std::vector<double> t_grid;
  for (double t = 0.0; t <= 5.0 + 1e-12; t += 0.05) t_grid.push_back(t);
  reports.push_back(check_moment_ratio_monotone(
      HalfLineModel{HalfLineModel::Kind::HalfGaussian, 1.0}, t_grid));
  reports.push_back(check_moment_ratio_monotone(
      HalfLineModel{HalfLineModel::Kind::Exponential, 1.0}, t_grid));

  std::vector<double> h_grid;
  for (double t = 0.0; t <= 10.0 + 1e-12; t += 0.5) h_grid.push_back(t);
  for (auto [beta, gamma] : {std::pair{1.0, 1.0}, {2.0, 0.5}, {0.7, 2.0}}) {
    LemmaReport r = check_exp_tail_positivity(beta, gamma, h_grid);
    r.lemma_id += "-beta" + detail::svg_num(beta) + "-gamma" + detail::svg_num(gamma);
    reports.push_back(r);
  }

  // Sign structure of the re-weighted mean: at most one sign change for
  // asymmetric bands, identically zero for symmetric ones.
  std::vector<double> alpha_grid;
  for (double a = -0.5; a <= -0.01 + 1e-12; a += 0.005) alpha_grid.push_back(a);
  struct BandCase {
    Family family;
    double a, b;
  };
  const BandCase asymmetric[] = {
      {Family::Gaussian, -2.0, 0.5},  {Family::Gaussian, 0.3, 1.3},
      {Family::Gaussian, -0.25, 0.5}, {Family::Gaussian, 0.5, 1.5},
      {Family::Laplace, -2.0, 0.5},   {Family::Laplace, 0.2, 1.0},
      {Family::Laplace, -0.4, 1.2},   {Family::Uniform, -1.2, 0.3},
      {Family::Uniform, -0.5, 0.0},   {Family::Uniform, 0.1, 0.8}};
  for (const BandCase& bc : asymmetric) {
    const DensityModel m{bc.family};
    const BandSpec band = band_stats(m, bc.a, bc.b);
    LemmaReport r;
    r.lemma_id = std::string("mean-sign-changes-") + family_name(bc.family) + "-a" +
                 detail::svg_num(bc.a) + "-b" + detail::svg_num(bc.b);
    r.grid = alpha_grid;
    for (double alpha : alpha_grid)
      r.values.push_back(reweighted_mean_1d(m, band, alpha));
    const int changes = count_mean_sign_changes(m, band, alpha_grid);
    r.worst_violation = std::max(0, changes - 1);
    r.verdict = changes <= 1;
    reports.push_back(r);
  }
  for (Family f : {Family::Gaussian, Family::Uniform, Family::Laplace}) {
    const DensityModel m{f};
    const BandSpec band = band_stats(m, -0.5, 0.5);
    LemmaReport r;
    r.lemma_id = std::string("mean-vanishes-symmetric-") + family_name(f);
    r.grid = alpha_grid;
    double worst = 0.0;
    for (double alpha : alpha_grid) {
      const double v = reweighted_mean_1d(m, band, alpha);
      r.values.push_back(v);
      worst = std::max(worst, std::fabs(v));
    }
    r.worst_violation = worst;
    r.verdict = worst <= 1e-9;
    reports.push_back(r);
  }

  // Spectral-gap statistic: positive at alpha = -0.1 for symmetric bands of
  // several masses, zero at alpha = 0.
  for (Family f : {Family::Gaussian, Family::Uniform, Family::Laplace}) {
    const DensityModel m{f};
    LemmaReport r;
    r.lemma_id = std::string("gap-statistic-positive-") + family_name(f);
    double worst = -std::numeric_limits<double>::infinity();
    for (double mass : {0.1, 0.2, 0.4}) {
      const double h = symmetric_half_width_for_mass(m, mass);
      const BandSpec band = band_stats(m, -h, h);
      const double s_neg = spectral_gap_statistic(m, band, -0.1);
      const double s_zero = spectral_gap_statistic(m, band, 0.0);
      r.grid.push_back(mass);
      r.values.push_back(s_neg);
      worst = std::max(worst, -s_neg);
      worst = std::max(worst, std::fabs(s_zero) - 1e-10);
    }
    r.worst_violation = worst;
    r.verdict = worst <= 0.0;
    reports.push_back(r);
  }
  return reports;
}

inline bool write_lemma_reports(const std::vector<LemmaReport>& reports,
                                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_lemma_reports: cannot open " + path);
  out << "[\n";
  bool all = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out << reports[i].to_json();
    if (i + 1 < reports.size()) out << ',';
    out << '\n';
    all = all && reports[i].verdict;
  }
  out << "]\n";
  return all;
}

}  // namespace cmoments
