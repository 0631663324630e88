#pragma once

// Test-side access to the bundled fixtures plus oracles that recompute
// quantities from the raw CSV files, independently of the library code paths.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polysart/materials.hpp"
#include "polysart/projection.hpp"
#include "polysart/spectra.hpp"

namespace polysart::fixtures {

inline std::filesystem::path data_dir() { return POLYSART_DATA_DIR; }
inline std::filesystem::path spectrum_path() { return data_dir() / "spectra" / "tungsten_130kvp_11bin.csv"; }
inline std::filesystem::path manifest_path() { return data_dir() / "materials" / "manifest.txt"; }

inline const LacModel& fixture_model() {
  static const LacModel model = LacModel::load(manifest_path());
  return model;
}

inline const Spectrum& fixture_spectrum() {
  static const Spectrum spectrum = load_spectrum(spectrum_path());
  return spectrum;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("polysart_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Two-column CSV as energy -> value, read with plain stream parsing.
inline std::map<double, double> raw_two_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::map<double, double> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream row(line);
    double e = 0.0, v = 0.0;
    char comma = 0;
    row >> e >> comma >> v;
    out[e] = v;
  }
  return out;
}

/// Polyenergetic model rebuilt from the raw CSVs in long double. All spectrum
/// bin energies are tabulated sample energies, so no energy interpolation is
/// needed.
struct RawPolyModel {
  std::vector<long double> weights;
  std::vector<long double> reference;               // per material, at 70 keV
  std::vector<std::vector<long double>> lac;       // [material][bin]

  RawPolyModel() {
    const auto spectrum = raw_two_column(spectrum_path());
    long double total = 0.0L;
    std::vector<double> energies;
    for (const auto& [e, w] : spectrum) {
      energies.push_back(e);
      weights.push_back(w);
      total += w;
    }
    for (auto& w : weights) w /= total;
    for (const char* name : {"air", "adipose", "soft_tissue", "cortical_bone"}) {
      const auto curve = raw_two_column(data_dir() / "materials" / (std::string(name) + ".csv"));
      reference.push_back(curve.at(70.0));
      std::vector<long double> row;
      for (double e : energies) row.push_back(curve.at(e));
      lac.push_back(row);
    }
  }

  std::size_t segment(long double t) const {
    std::size_t k = 0;
    while (k + 2 < reference.size() && t >= reference[k + 1]) ++k;
    return k;
  }

  long double mu(long double t, std::size_t h) const {
    const std::size_t k = segment(t);
    const long double d = reference[k + 1] - reference[k];
    return ((reference[k + 1] - t) * lac[k][h] + (t - reference[k]) * lac[k + 1][h]) / d;
  }

  long double dmu(long double t, std::size_t h) const {
    const std::size_t k = segment(t);
    return (lac[k + 1][h] - lac[k][h]) / (reference[k + 1] - reference[k]);
  }

  /// -ln P_i(t) for a ray with the given (pixel, length) entries.
  long double neg_log_intensity(const std::vector<std::pair<std::size_t, double>>& ray,
                                const std::vector<long double>& t) const {
    long double p = 0.0L;
    for (std::size_t h = 0; h < weights.size(); ++h) {
      long double line = 0.0L;
      for (const auto& [j, a] : ray) line += a * mu(t[j], h);
      p += weights[h] * std::exp(-line);
    }
    return -std::log(p);
  }
};

inline const RawPolyModel& raw_model() {
  static const RawPolyModel model;
  return model;
}

inline std::vector<std::vector<std::pair<std::size_t, double>>> ray_lists(const DenseMatrix& a) {
  std::vector<std::vector<std::pair<std::size_t, double>>> rays(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (a(i, j) != 0.0) rays[i].push_back({j, a(i, j)});
  return rays;
}

/// Central differences of f(t) = -ln P(t) + ln p in long double, step delta.
/// Only rays crossing pixel j are re-evaluated for column j.
inline DenseMatrix finite_difference_residual_jacobian(const DenseMatrix& a, const std::vector<double>& t,
                                                       double delta = 1e-6) {
  const auto& model = raw_model();
  const auto rays = ray_lists(a);
  DenseMatrix out(a.rows, a.cols);
  std::vector<long double> tp(t.begin(), t.end());
  for (std::size_t j = 0; j < a.cols; ++j) {
    for (std::size_t i = 0; i < a.rows; ++i) {
      if (a(i, j) == 0.0) continue;
      tp[j] = static_cast<long double>(t[j]) + delta;
      const long double up = model.neg_log_intensity(rays[i], tp);
      tp[j] = static_cast<long double>(t[j]) - delta;
      const long double down = model.neg_log_intensity(rays[i], tp);
      tp[j] = t[j];
      out(i, j) = static_cast<double>((up - down) / (2.0L * delta));
    }
  }
  return out;
}

/// pSART Jacobian I - D A^T M J_f of the two-pixel system at t, assembled in
/// long double directly from the derivative formula and the raw fixtures.
inline DenseMatrix two_pixel_iteration_jacobian(double t1, double t2) {
  const auto& model = raw_model();
  const long double a[2][2] = {{1.0L, 1.0L}, {0.28L, 1.13L}};
  const long double t[2] = {t1, t2};
  long double jf[2][2];
  for (int i = 0; i < 2; ++i) {
    long double p = 0.0L;
    std::vector<long double> terms(model.weights.size());
    for (std::size_t h = 0; h < model.weights.size(); ++h) {
      terms[h] = model.weights[h] * std::exp(-(a[i][0] * model.mu(t[0], h) + a[i][1] * model.mu(t[1], h)));
      p += terms[h];
    }
    for (int j = 0; j < 2; ++j) {
      long double s = 0.0L;
      for (std::size_t h = 0; h < terms.size(); ++h) s += terms[h] * model.dmu(t[j], h);
      jf[i][j] = a[i][j] * s / p;
    }
  }
  const long double gamma[2] = {a[0][0] + a[0][1], a[1][0] + a[1][1]};
  const long double beta[2] = {a[0][0] + a[1][0], a[0][1] + a[1][1]};
  DenseMatrix out(2, 2);
  for (int j = 0; j < 2; ++j) {
    for (int c = 0; c < 2; ++c) {
      long double g = 0.0L;
      for (int i = 0; i < 2; ++i) g += a[i][j] / gamma[i] * jf[i][c];
      out(j, c) = static_cast<double>((j == c ? 1.0L : 0.0L) - g / beta[j]);
    }
  }
  return out;
}

/// Spectral radius of a real 2x2 matrix from the quadratic formula.
inline double quadratic_spectral_radius(const DenseMatrix& m) {
  const long double tr = static_cast<long double>(m(0, 0)) + m(1, 1);
  const long double det = static_cast<long double>(m(0, 0)) * m(1, 1) - static_cast<long double>(m(0, 1)) * m(1, 0);
  const long double disc = tr * tr - 4.0L * det;
  if (disc < 0.0L) return static_cast<double>(std::sqrt(det));
  const long double r = std::sqrt(disc);
  return static_cast<double>(std::max(std::abs((tr + r) / 2.0L), std::abs((tr - r) / 2.0L)));
}

/// rho(T) of the monoenergetic two-pixel system: W has row sums 1, so its
/// eigenvalues are 1 and trace(W) - 1, and rho(T) = 1 - (trace(W) - 1).
inline double two_pixel_sart_radius() {
  const long double gamma1 = 2.0L, gamma2 = 1.41L, beta1 = 1.28L, beta2 = 2.13L;
  const long double w11 = (1.0L / gamma1 + 0.28L * 0.28L / gamma2) / beta1;
  const long double w22 = (1.0L / gamma1 + 1.13L * 1.13L / gamma2) / beta2;
  return static_cast<double>(1.0L - (w11 + w22 - 1.0L));
}

/// Length of the line x cos(theta) + y sin(theta) = s inside the box
/// [x0, x1] x [y0, y1], by Liang-Barsky clipping of the parametric line.
inline double clipped_length(double theta, double s, double x0, double x1, double y0, double y1) {
  const long double c = std::cos(static_cast<long double>(theta));
  const long double sn = std::sin(static_cast<long double>(theta));
  const long double px = s * c, py = s * sn;  // foot of the perpendicular
  const long double dx = -sn, dy = c;        // unit direction
  long double lo = -1e9L, hi = 1e9L;
  auto clip = [&](long double p, long double d, long double a, long double b) {
    if (std::abs(d) < 1e-18L) return p >= a && p <= b;
    long double u = (a - p) / d, v = (b - p) / d;
    if (u > v) std::swap(u, v);
    lo = std::max(lo, u);
    hi = std::min(hi, v);
    return true;
  };
  if (!clip(px, dx, x0, x1) || !clip(py, dy, y0, y1)) return 0.0;
  return hi > lo ? static_cast<double>(hi - lo) : 0.0;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

/// Uniform sample in [lo, hi] kept at least `margin` away from every material
/// reference value.
inline double sample_away_from_boundaries(std::mt19937_64& rng, double lo, double hi, double margin) {
  std::uniform_real_distribution<double> u(lo, hi);
  const auto& refs = fixture_model().reference_lacs();
  for (;;) {
    const double t = u(rng);
    bool ok = true;
    for (double r : refs) ok = ok && std::abs(t - r) > margin;
    if (ok) return t;
  }
}

}  // namespace polysart::fixtures
