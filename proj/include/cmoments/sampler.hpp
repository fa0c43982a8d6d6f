#pragma once

// Problem-instance construction (hidden normal, hidden affine map) and
// dataset generation from the banded product distribution, plus dataset
// import/export (CSV and a little-endian binary block).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmoments/density.hpp"
#include "cmoments/linalg.hpp"
#include "cmoments/rng.hpp"

namespace cmoments {

enum class AffineMode { Identity, RandomRotation, RandomAffine };

inline const char* affine_mode_name(AffineMode m) {
  switch (m) {
    case AffineMode::Identity: return "identity";
    case AffineMode::RandomRotation: return "rotation";
    case AffineMode::RandomAffine: return "random";
  }
  return "?";
}

/// Thrown when a band fails the admissibility check; carries the measured
/// masses so callers can report which part fell short.
struct InadmissibleBandError : std::runtime_error {
  InadmissibleBandError(const BandSpec& band, double eps)
      : std::runtime_error(format(band, eps)),
        left_tail(band.left_tail),
        mass(band.mass),
        right_tail(band.right_tail),
        epsilon(eps) {}

  static std::string format(const BandSpec& band, double eps) {
    std::ostringstream os;
    os << "inadmissible band: min(left_tail=" << band.left_tail
       << ", mass=" << band.mass << ", right_tail=" << band.right_tail
       << ") < epsilon=" << eps;
    return os.str();
  }

  double left_tail, mass, right_tail, epsilon;
};

/// A full problem instance.  Data is produced as x = A * (rotation * z) +
/// shift where z has the banded coordinate first; the hidden normal is the
/// first column of the rotation.
struct MarginInstance {
  DensityModel model;
  BandSpec band;
  std::size_t d = 0;
  double epsilon = 0.0;
  AffineMode mode = AffineMode::Identity;
  Matrix rotation;  // orthogonal
  Matrix affine;    // invertible
  Vec shift;
  Vec u;  // first column of rotation
};

struct InstanceOptions {
  AffineMode mode = AffineMode::Identity;
  double kappa_max = 10.0;
  double shift_scale = 1.0;
  int max_attempts = 100;
};

namespace detail {

inline Matrix gaussian_matrix(std::size_t d, SplitMix64& rng) {
  Matrix m(d, d);
  const DensityModel gauss{Family::Gaussian};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = quantile(gauss, rng.uniform());
  return m;
}

inline Matrix haar_rotation(std::size_t d, SplitMix64& rng) {
  return orthonormalize_columns(gaussian_matrix(d, rng));
}

// Raises the small singular values of a so that its condition number drops
// to kappa_max.  Right-multiplication by V diag(sigma'/sigma) V^T rescales
// the spectrum in place.
inline Matrix clamp_condition(const Matrix& a, double kappa_max) {
  const std::size_t d = a.rows();
  SymMatrix gram(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a(k, i) * a(k, j);
      gram.at(i, j) = s;
    }
  const auto pairs = sym_eigen(gram);
  const double sigma_max = std::sqrt(std::max(pairs.front().value, 0.0));
  if (sigma_max <= 0.0)
    throw std::runtime_error("clamp_condition: zero matrix");
  const double floor = sigma_max / kappa_max * (1.0 + 1e-9);
  SymMatrix scale(d);
  for (const EigenPair& p : pairs) {
    const double sigma = std::sqrt(std::max(p.value, 0.0));
    if (sigma == 0.0) throw std::runtime_error("clamp_condition: rank-deficient draw");
    const double ratio = std::max(sigma, floor) / sigma;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j)
        scale.at(i, j) += ratio * p.vector[i] * p.vector[j];
  }
  return matmul(a, scale.to_dense());
}

}  // namespace detail

inline MarginInstance make_instance(const DensityModel& model, double a, double b,
                                    std::size_t d, double epsilon,
                                    const InstanceOptions& opts, SplitMix64& rng) {
  if (d < 2) throw std::invalid_argument("make_instance: d must be >= 2");
  MarginInstance inst;
  inst.model = model;
  inst.band = band_stats(model, a, b);
  if (!epsilon_check(inst.band, epsilon).satisfied)
    throw InadmissibleBandError(inst.band, epsilon);
  inst.d = d;
  inst.epsilon = epsilon;
  inst.mode = opts.mode;

  switch (opts.mode) {
    case AffineMode::Identity:
      inst.rotation = Matrix::identity(d);
      inst.affine = Matrix::identity(d);
      inst.shift.assign(d, 0.0);
      break;
    case AffineMode::RandomRotation:
      inst.rotation = detail::haar_rotation(d, rng);
      inst.affine = Matrix::identity(d);
      inst.shift.assign(d, 0.0);
      break;
    case AffineMode::RandomAffine: {
      inst.rotation = detail::haar_rotation(d, rng);
      // Gaussian draws rarely satisfy a tight condition bound in higher
      // dimension, so after the attempt budget the last draw has its small
      // singular values raised to the bound instead.
      int attempt = 0;
      for (;;) {
        inst.affine = detail::gaussian_matrix(d, rng);
        if (condition_number(inst.affine) <= opts.kappa_max) break;
        if (++attempt >= opts.max_attempts) {
          inst.affine = detail::clamp_condition(inst.affine, opts.kappa_max);
          break;
        }
      }
      const DensityModel gauss{Family::Gaussian};
      inst.shift.resize(d);
      for (std::size_t i = 0; i < d; ++i)
        inst.shift[i] = opts.shift_scale * quantile(gauss, rng.uniform());
      break;
    }
  }
  inst.u.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) inst.u[i] = inst.rotation(i, 0);
  return inst;
}

struct Dataset {
  Matrix x;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  MarginInstance instance;
};

/// Whether the banded coordinate is standardized to mean 0, variance 1
/// (the affine model) or left as the raw truncated law (the isotropic
/// product model, where the mean/variance shift itself carries the signal).
enum class MarginCoordinate { Standardized, Raw };

/// Generates N rows.  Row r consumes exactly d uniforms from the substream
/// keyed on (seed, r), so output is identical however rows are scheduled.
inline Dataset generate(const MarginInstance& inst, std::size_t n, std::uint64_t seed,
                        MarginCoordinate coord = MarginCoordinate::Standardized) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  const std::size_t d = inst.d;
  const double sigma1 = std::sqrt(inst.band.sigma1_sq);
  const bool identity_map = inst.mode == AffineMode::Identity;

  Dataset ds;
  ds.x = Matrix(n, d);
  ds.seed = seed;
  ds.n = n;
  ds.instance = inst;

  Vec z(d), w(d);
  for (std::size_t r = 0; r < n; ++r) {
    SplitMix64 g = substream(seed, r);
    double z1 = sample_truncated(inst.model, inst.band, g);
    if (coord == MarginCoordinate::Standardized)
      z1 = (z1 - inst.band.mu1) / sigma1;
    z[0] = z1;
    for (std::size_t j = 1; j < d; ++j) z[j] = quantile(inst.model, g.uniform());

    double* row = ds.x.row(r);
    if (identity_map) {
      for (std::size_t i = 0; i < d; ++i) row[i] = z[i];
      continue;
    }
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += inst.rotation(i, j) * z[j];
      w[i] = s;
    }
    for (std::size_t i = 0; i < d; ++i) {
      double s = inst.shift[i];
      for (std::size_t j = 0; j < d; ++j) s += inst.affine(i, j) * w[j];
      row[i] = s;
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Dataset files.

namespace detail {

inline void format_double(std::string& out, double v) {
  char buf[40];
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace detail

/// CSV with header x0,...,x{d-1}; 17 significant digits round-trip doubles
/// exactly.
inline void write_csv(const Matrix& x, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  std::string line;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (j) line += ',';
    line += 'x';
    line += std::to_string(j);
  }
  line += '\n';
  out << line;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    line.clear();
    const double* row = x.row(r);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (j) line += ',';
      detail::format_double(line, row[j]);
    }
    line += '\n';
    out << line;
  }
}

inline Matrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("read_csv: empty file");
  std::size_t d = 1;
  for (char c : header)
    if (c == ',') ++d;
  std::vector<double> values;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) values.push_back(std::stod(cell));
    ++n;
  }
  if (values.size() != n * d) throw std::runtime_error("read_csv: ragged rows");
  Matrix x(n, d);
  x.data() = std::move(values);
  return x;
}

inline constexpr char kDatasetMagic[4] = {'C', 'M', 'D', 'S'};
inline constexpr std::uint32_t kDatasetVersion = 1;

/// Binary block: magic "CMDS", u32 version, u64 N, u32 d, then N*d f64
/// values row-major, all little-endian.
inline void write_binary(const Matrix& x, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_binary: cannot open " + path);
  out.write(kDatasetMagic, 4);
  const std::uint32_t version = kDatasetVersion;
  const std::uint64_t n = x.rows();
  const std::uint32_t d = static_cast<std::uint32_t>(x.cols());
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&d), sizeof d);
  out.write(reinterpret_cast<const char*>(x.data().data()),
            static_cast<std::streamsize>(x.data().size() * sizeof(double)));
}

inline Matrix read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_binary: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, d = 0;
  std::uint64_t n = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&d), sizeof d);
  if (!in || std::memcmp(magic, kDatasetMagic, 4) != 0)
    throw std::runtime_error("read_binary: bad magic in " + path);
  if (version != kDatasetVersion)
    throw std::runtime_error("read_binary: unsupported version");
  Matrix x(static_cast<std::size_t>(n), d);
  in.read(reinterpret_cast<char*>(x.data().data()),
          static_cast<std::streamsize>(x.data().size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_binary: truncated file " + path);
  return x;
}

}  // namespace cmoments
