// Command-line front end: dataset generation, single-shot recovery, the
// sweep harness, and lemma verification.
//
// Flags may also be supplied through a flat key=value config file
// (--config); keys are the long flag names without the leading dashes, '#'
// starts a comment, and explicit command-line flags win over file values.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cmoments/experiment.hpp"

namespace {

using namespace cmoments;

struct Options {
  std::string config;
  std::string family = "gaussian";
  double a = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();
  std::size_t dim = 10;
  std::size_t samples = 200000;
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  double alpha1 = -0.1;
  double alpha2 = -0.2;
  double alpha3 = -0.1;
  std::string affine = "rotation";
  double kappa_max = 10.0;
  double min_side_fraction = 0.05;
  double epsilon = 0.01;
  unsigned threads = 0;
  bool timings = false;
  std::string out = "out";
  std::string input;
  std::string format = "both";
  double grid_min = std::numeric_limits<double>::quiet_NaN();
  double grid_max = std::numeric_limits<double>::quiet_NaN();
  double grid_step = 0.25;
  std::string dims = "5,10,20,40";
  std::string masses = "0.05,0.1,0.2,0.3,0.4";
  std::string b_list;
};

struct Binding {
  CLI::Option* opt;
  std::string key;
  std::function<void(const std::string&)> apply;
};

std::vector<Binding> g_bindings;

inline void parse_into(double& var, const std::string& s) { var = std::stod(s); }
inline void parse_into(std::size_t& var, const std::string& s) { var = std::stoull(s); }
inline void parse_into(unsigned& var, const std::string& s) {
  var = static_cast<unsigned>(std::stoul(s));
}
inline void parse_into(std::string& var, const std::string& s) { var = s; }
inline void parse_into(bool& var, const std::string& s) {
  var = s == "1" || s == "true" || s == "yes" || s == "on";
}

template <class T>
CLI::Option* bind_option(CLI::App* cmd, const std::string& flag, T& var, const std::string& desc) {
  CLI::Option* opt = cmd->add_option(flag, var, desc);
  g_bindings.push_back({opt, flag.substr(2), [&var](const std::string& s) { parse_into(var, s); }});
  return opt;
}

CLI::Option* bind_flag(CLI::App* cmd, const std::string& flag, bool& var,
                       const std::string& desc) {
  CLI::Option* opt = cmd->add_flag(flag, var, desc);
  g_bindings.push_back({opt, flag.substr(2), [&var](const std::string& s) { parse_into(var, s); }});
  return opt;
}

std::map<std::string, std::string> load_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      const auto last = s.find_last_not_of(" \t\r");
      return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

void apply_config(const std::string& path) {
  if (path.empty()) return;
  const auto kv = load_config(path);
  // Each flag is registered once per subcommand against the same variable;
  // a key counts as explicitly given if any of its registrations was used.
  std::map<std::string, bool> given;
  for (const Binding& b : g_bindings)
    if (b.opt->count() > 0) given[b.key] = true;
  for (const Binding& b : g_bindings) {
    if (given.count(b.key)) continue;  // explicit flags win
    const auto it = kv.find(b.key);
    if (it != kv.end()) {
      b.apply(it->second);
      given[b.key] = true;  // apply once
    }
  }
}

DensityModel parse_family(const std::string& name) {
  if (name == "gaussian") return {Family::Gaussian};
  if (name == "uniform") return {Family::Uniform};
  if (name == "laplace") return {Family::Laplace};
  throw CLI::ValidationError("--family", "unknown family '" + name + "'");
}

AffineMode parse_affine(const std::string& name) {
  if (name == "identity") return AffineMode::Identity;
  if (name == "rotation") return AffineMode::RandomRotation;
  if (name == "random") return AffineMode::RandomAffine;
  throw CLI::ValidationError("--affine", "unknown affine mode '" + name + "'");
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ','))
    if (!cell.empty()) out.push_back(std::stod(cell));
  return out;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void resolve_band_defaults(Options& o, bool for_compare) {
  const bool uniform = o.family == "uniform";
  if (std::isnan(o.a)) o.a = for_compare ? (uniform ? -0.5 : -2.0) : -0.5;
  if (std::isnan(o.b)) o.b = 0.5;
  if (std::isnan(o.grid_min)) o.grid_min = uniform ? -1.5 : -3.0;
  if (std::isnan(o.grid_max)) o.grid_max = uniform ? 1.5 : 3.0;
}

SweepConfig make_sweep_config(Options& o, bool for_compare = false) {
  resolve_band_defaults(o, for_compare);
  SweepConfig cfg;
  cfg.model = parse_family(o.family);
  cfg.d = o.dim;
  cfg.n = o.samples;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.trial.alphas = {o.alpha1, o.alpha2, o.alpha3};
  cfg.trial.min_side_fraction = o.min_side_fraction;
  cfg.affine_mode = parse_affine(o.affine);
  cfg.kappa_max = o.kappa_max;
  cfg.epsilon = o.epsilon;
  cfg.threads = resolve_threads(o.threads);
  cfg.include_timing = o.timings;
  cfg.out_dir = o.out;
  cfg.grid_min = o.grid_min;
  cfg.grid_max = o.grid_max;
  cfg.grid_step = o.grid_step;
  cfg.band_a = o.a;
  cfg.band_b = o.b;
  cfg.compare_a = o.a;
  const auto dims = parse_list(o.dims);
  cfg.dims.clear();
  for (double d : dims) cfg.dims.push_back(static_cast<std::size_t>(d));
  cfg.mass_targets = parse_list(o.masses);
  if (!o.b_list.empty()) cfg.compare_bs = parse_list(o.b_list);
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

void add_common(CLI::App* cmd, Options& o) {
  bind_option(cmd, "--family", o.family, "gaussian | uniform | laplace");
  bind_option(cmd, "--a", o.a, "band left endpoint");
  bind_option(cmd, "--b", o.b, "band right endpoint");
  bind_option(cmd, "--dim", o.dim, "ambient dimension");
  bind_option(cmd, "--samples", o.samples, "sample size per trial");
  bind_option(cmd, "--trials", o.trials, "trials per configuration");
  bind_option(cmd, "--seed", o.seed, "master seed");
  bind_option(cmd, "--alpha1", o.alpha1, "first mean re-weighting exponent");
  bind_option(cmd, "--alpha2", o.alpha2, "second mean re-weighting exponent");
  bind_option(cmd, "--alpha3", o.alpha3, "covariance re-weighting exponent");
  bind_option(cmd, "--affine", o.affine, "identity | rotation | random");
  bind_option(cmd, "--kappa-max", o.kappa_max, "condition cap for random affine maps");
  bind_option(cmd, "--min-side-fraction", o.min_side_fraction,
       "minimum fraction of points on each side of the margin");
  bind_option(cmd, "--epsilon", o.epsilon, "band admissibility threshold");
  bind_option(cmd, "--threads", o.threads, "worker threads (0 = all cores)");
  bind_flag(cmd, "--timings", o.timings, "include elapsed_ms in trial CSVs");
  bind_option(cmd, "--out", o.out, "output directory");
}

int cmd_generate(Options& o) {
  resolve_band_defaults(o, false);
  std::filesystem::create_directories(o.out);
  SplitMix64 rng(mix64(o.seed) ^ 0xA5A5A5A5ull);
  InstanceOptions opts{parse_affine(o.affine), o.kappa_max};
  const MarginInstance inst =
      make_instance(parse_family(o.family), o.a, o.b, o.dim, o.epsilon, opts, rng);
  const Dataset ds = generate(inst, o.samples, o.seed);
  if (o.format == "csv" || o.format == "both")
    write_csv(ds.x, o.out + "/dataset.csv");
  if (o.format == "bin" || o.format == "both")
    write_binary(ds.x, o.out + "/dataset.bin");

  std::ofstream meta(o.out + "/instance.txt", std::ios::binary);
  meta << "family=" << family_name(inst.model.family) << "\n"
       << "a=" << inst.band.a << "\nb=" << inst.band.b << "\ndim=" << inst.d
       << "\nsamples=" << ds.n << "\nseed=" << ds.seed << "\naffine="
       << affine_mode_name(inst.mode) << "\nmass=" << inst.band.mass
       << "\nleft_tail=" << inst.band.left_tail
       << "\nright_tail=" << inst.band.right_tail << "\nmu1=" << inst.band.mu1
       << "\nsigma1_sq=" << inst.band.sigma1_sq << "\nu=";
  for (std::size_t i = 0; i < inst.d; ++i) meta << (i ? "," : "") << inst.u[i];
  meta << "\n";
  std::cout << "wrote " << ds.n << " x " << inst.d << " dataset to " << o.out
            << " (mass=" << inst.band.mass << ", left=" << inst.band.left_tail
            << ", right=" << inst.band.right_tail << ")\n";
  return 0;
}

int cmd_recover(Options& o) {
  const AlphaConfig alphas{o.alpha1, o.alpha2, o.alpha3};
  std::filesystem::create_directories(o.out);

  if (!o.input.empty()) {
    const bool binary = o.input.size() > 4 && o.input.substr(o.input.size() - 4) == ".bin";
    const Matrix x = binary ? read_binary(o.input) : read_csv(o.input);
    const CandidateSet cs = candidates(x, alphas);
    const Matrix y = apply_whitener(cs.whitener, x);
    const Selection sel = select(y, cs, o.min_side_fraction);
    std::cout << "selected=" << candidate_kind_name(sel.chosen_kind) << "\n";
    for (int i = 0; i < 3; ++i) {
      std::cout << candidate_kind_name(static_cast<CandidateKind>(i)) << "_width=";
      if (sel.reports[i])
        std::cout << sel.reports[i]->width;
      else
        std::cout << "nan";
      std::cout << "\n";
    }
    std::cout << "direction=";
    for (std::size_t i = 0; i < sel.chosen.size(); ++i)
      std::cout << (i ? "," : "") << sel.chosen[i];
    std::cout << "\n";
    return 0;
  }

  resolve_band_defaults(o, false);
  SplitMix64 rng(mix64(o.seed) ^ 0xA5A5A5A5ull);
  InstanceOptions opts{parse_affine(o.affine), o.kappa_max};
  const MarginInstance inst =
      make_instance(parse_family(o.family), o.a, o.b, o.dim, o.epsilon, opts, rng);
  TrialConfig tc{alphas, o.min_side_fraction};
  const TrialRecord rec = run_trial(inst, o.samples, tc, o.seed);
  write_trial_csv(o.out + "/recovery.csv", {rec}, o.timings);
  std::cout << "selected=" << candidate_kind_name(rec.selected_kind)
            << "\nsin_theta_selected=" << rec.sin_theta_selected
            << "\nsin_theta_mean1=" << rec.sin_theta_mean1
            << "\nsin_theta_mean2=" << rec.sin_theta_mean2
            << "\nsin_theta_cov=" << rec.sin_theta_cov << "\n";
  return 0;
}

int cmd_verify(Options& o) {
  std::filesystem::create_directories(o.out);
  const std::vector<LemmaReport> reports = verify_lemmas();
  const bool all = write_lemma_reports(reports, o.out + "/lemma_reports.json");
  for (const LemmaReport& r : reports)
    std::cout << (r.verdict ? "PASS " : "FAIL ") << r.lemma_id
              << " (worst violation " << r.worst_violation << ")\n";
  std::cout << (all ? "all lemma checks passed" : "lemma checks FAILED") << "\n";
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised halfspace recovery from contrastive moments"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config, "flat key=value config file");

  CLI::App* generate_cmd =
      app.add_subcommand("generate", "sample a banded dataset and write it out");
  add_common(generate_cmd, o);
  bind_option(generate_cmd, "--format", o.format, "csv | bin | both");

  CLI::App* recover_cmd =
      app.add_subcommand("recover", "run the recovery pipeline on one dataset");
  add_common(recover_cmd, o);
  bind_option(recover_cmd, "--input", o.input, "read dataset from file (.csv or .bin)");

  CLI::App* grid_cmd = app.add_subcommand("sweep-grid", "median sin-theta heatmap over (a,b)");
  add_common(grid_cmd, o);
  bind_option(grid_cmd, "--grid-min", o.grid_min, "grid lower bound");
  bind_option(grid_cmd, "--grid-max", o.grid_max, "grid upper bound");
  bind_option(grid_cmd, "--grid-step", o.grid_step, "grid step");

  CLI::App* dim_cmd = app.add_subcommand("sweep-dim", "dimension sweep at fixed N");
  add_common(dim_cmd, o);
  bind_option(dim_cmd, "--dims", o.dims, "comma-separated dimensions");

  CLI::App* eps_cmd = app.add_subcommand("sweep-eps", "margin-mass sweep (symmetric bands)");
  add_common(eps_cmd, o);
  bind_option(eps_cmd, "--masses", o.masses, "comma-separated band masses");

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "contrastive mean vs covariance at fixed a");
  add_common(compare_cmd, o);
  bind_option(compare_cmd, "--b-list", o.b_list, "comma-separated right endpoints");

  CLI::App* verify_cmd =
      app.add_subcommand("verify-lemmas", "run the quadrature lemma checks");
  add_common(verify_cmd, o);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_config(o.config);
    if (generate_cmd->parsed()) return cmd_generate(o);
    if (recover_cmd->parsed()) return cmd_recover(o);
    if (verify_cmd->parsed()) return cmd_verify(o);
    if (grid_cmd->parsed()) {
      SweepConfig cfg = make_sweep_config(o);
      const auto cells = sweep_grid(cfg);
      std::size_t run = 0;
      for (const auto& c : cells)
        if (!std::isnan(c.median_sin_theta)) ++run;
      std::cout << "grid cells run: " << run << " of " << cells.size()
                << "; outputs in " << cfg.out_dir << "\n";
      return 0;
    }
    if (dim_cmd->parsed()) {
      SweepConfig cfg = make_sweep_config(o);
      for (const auto& p : sweep_dimension(cfg))
        std::cout << "d=" << p.x << " median_sin_theta=" << p.median_selected << "\n";
      return 0;
    }
    if (eps_cmd->parsed()) {
      SweepConfig cfg = make_sweep_config(o);
      for (const auto& p : sweep_epsilon(cfg))
        std::cout << "inv_mass=" << p.x << " median_sin_theta=" << p.median_selected
                  << "\n";
      return 0;
    }
    if (compare_cmd->parsed()) {
      SweepConfig cfg = make_sweep_config(o, true);
      for (const auto& p : compare_mean_cov(cfg))
        std::cout << "b=" << p.x << " mean=" << p.median_best_mean
                  << " cov=" << p.median_cov << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
