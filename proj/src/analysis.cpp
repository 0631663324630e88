#include "polysart/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "polysart/error.hpp"
#include "polysart/kernels.hpp"
#include "polysart/parallel.hpp"
#include "polysart/phantoms.hpp"

namespace polysart {
namespace {

void require_size(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected " + std::to_string(expected) +
                                                  ", got " + std::to_string(actual));
  }
}

void require_square(const DenseMatrix& m, const char* what) {
  if (m.rows != m.cols) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be square, got " +
                                                  std::to_string(m.rows) + "x" + std::to_string(m.cols));
  }
}

// x - D A^T M y, written into out.
void subtract_weighted_backprojection(const SystemMatrix& a, const SartWeights& w, std::span<const double> x,
                                      std::vector<double>& y, std::span<double> out) {
  const auto& k = kernels::active();
  k.hadamard(y.data(), w.inv_row.data(), y.data(), y.size());
  std::vector<double> back(a.cols());
  a.apply_transpose(y, back);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = x[j] - w.inv_col[j] * back[j];
}

// Per-ray sensitivity of -ln P_i to a unit change of t inside LAC segment k:
// sum_h pi_ih * slope(k, h), stored at [k * m + i]. Only segments occupied by
// some pixel are filled.
struct ResidualSensitivity {
  std::vector<std::size_t> segments;  // per pixel
  std::vector<bool> occupied;         // per segment
  std::vector<double> per_segment;
};

ResidualSensitivity residual_sensitivity(const PolyenergeticProjector& projector, std::span<const double> t) {
  const SystemMatrix& a = projector.system();
  require_size(t.size(), a.cols(), "attenuation map");
  for (double v : t) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "attenuation map has non-finite entries");
  }
  const auto ev = projector.evaluate(t);
  const std::size_t m = a.rows();
  const std::size_t energies = projector.energy_count();
  const std::size_t segment_count = projector.table().segment_count();

  ResidualSensitivity out;
  out.segments = ev.segments;
  out.occupied.assign(segment_count, false);
  for (std::size_t s : ev.segments) out.occupied[s] = true;
  out.per_segment.assign(segment_count * m, 0.0);

  std::vector<double> pi(energies);
  for (std::size_t i = 0; i < m; ++i) {
    const double p = ev.intensity[i];
    if (!(p > 0.0)) {
      throw Error(ErrorKind::NonPositive, "modeled intensity of ray " + std::to_string(i) + " is zero");
    }
    for (std::size_t h = 0; h < energies; ++h) {
      pi[h] = projector.weight(h) * std::exp(-ev.line_integrals[i * energies + h]) / p;
    }
    for (std::size_t k = 0; k < segment_count; ++k) {
      if (!out.occupied[k]) continue;
      double s = 0.0;
      for (std::size_t h = 0; h < energies; ++h) s += pi[h] * projector.table().slope(k, h);
      out.per_segment[k * m + i] = s;
    }
  }
  return out;
}

std::complex<double> evaluate_polynomial(std::span<const double> c, std::complex<double> z) {
  std::complex<double> v = c[0];
  for (std::size_t k = 1; k < c.size(); ++k) v = v * z + c[k];
  return v;
}

std::complex<double> evaluate_derivative(std::span<const double> c, std::complex<double> z) {
  const std::size_t n = c.size() - 1;
  std::complex<double> v = 0.0;
  for (std::size_t k = 0; k < n; ++k) v = v * z + c[k] * static_cast<double>(n - k);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

LinearOperator::LinearOperator(std::size_t dimension, Apply apply) : dimension_(dimension), apply_(std::move(apply)) {
  if (!apply_) throw Error(ErrorKind::InvalidArgument, "linear operator needs an apply function");
}

LinearOperator LinearOperator::from_dense(DenseMatrix m) {
  require_square(m, "operator matrix");
  const std::size_t n = m.rows;
  return LinearOperator(n, [m = std::move(m)](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < m.rows; ++i) y[i] = kernels::dot(m.row(i), x);
  });
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), dimension_, "operator input");
  require_size(y.size(), dimension_, "operator output");
  apply_(x, y);
}

std::vector<double> LinearOperator::operator()(std::span<const double> x) const {
  std::vector<double> y(dimension_);
  apply(x, y);
  return y;
}

DenseMatrix LinearOperator::to_dense() const {
  DenseMatrix out(dimension_, dimension_);
  std::vector<double> e(dimension_, 0.0);
  std::vector<double> col(dimension_);
  for (std::size_t j = 0; j < dimension_; ++j) {
    e[j] = 1.0;
    apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < dimension_; ++i) out(i, j) = col[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

DenseMatrix sart_update_matrix(const SystemMatrix& a) {
  const DenseMatrix dense = a.to_dense();
  const SartWeights w = sart_weights(a);
  const std::size_t n = a.cols();
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (w.inv_row[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = dense(i, j) * w.inv_row[i];
      if (aij == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) out(j, c) += aij * dense(i, c);
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < n; ++c) out(j, c) *= w.inv_col[j];
  return out;
}

DenseMatrix sart_iteration_matrix(const SystemMatrix& a) {
  DenseMatrix t = sart_update_matrix(a);
  for (double& v : t.data) v = -v;
  for (std::size_t j = 0; j < t.rows; ++j) t(j, j) += 1.0;
  return t;
}

LinearOperator sart_iteration_operator(const SystemMatrix& a) {
  return LinearOperator(a.cols(), [&a, w = sart_weights(a)](std::span<const double> x, std::span<double> y) {
    std::vector<double> line(a.rows());
    a.apply(x, line);
    subtract_weighted_backprojection(a, w, x, line, y);
  });
}

// ---------------------------------------------------------------------------

DenseMatrix residual_jacobian(const PolyenergeticProjector& projector, std::span<const double> t) {
  const SystemMatrix& a = projector.system();
  const ResidualSensitivity s = residual_sensitivity(projector, t);
  const std::size_t m = a.rows();
  DenseMatrix out(m, a.cols());
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = a.row(i);
    for (std::size_t k = 0; k < row.values.size(); ++k) {
      const std::size_t j = row.columns[k];
      out(i, j) = row.values[k] * s.per_segment[s.segments[j] * m + i];
    }
  }
  return out;
}

LinearOperator iteration_jacobian_operator(const PolyenergeticProjector& projector, std::span<const double> t) {
  const SystemMatrix& a = projector.system();
  return LinearOperator(a.cols(), [&a, s = residual_sensitivity(projector, t), w = sart_weights(a)](
                                      std::span<const double> x, std::span<double> y) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    std::vector<double> jf(m, 0.0);
    std::vector<double> masked(n);
    std::vector<double> line(m);
    for (std::size_t k = 0; k < s.occupied.size(); ++k) {
      if (!s.occupied[k]) continue;
      for (std::size_t j = 0; j < n; ++j) masked[j] = s.segments[j] == k ? x[j] : 0.0;
      a.apply(masked, line);
      const double* scale = s.per_segment.data() + k * m;
      for (std::size_t i = 0; i < m; ++i) jf[i] += scale[i] * line[i];
    }
    subtract_weighted_backprojection(a, w, x, jf, y);
  });
}

DenseMatrix iteration_jacobian(const PolyenergeticProjector& projector, std::span<const double> t) {
  const SystemMatrix& a = projector.system();
  const DenseMatrix jf = residual_jacobian(projector, t);
  const SartWeights w = sart_weights(a);
  const std::size_t n = a.cols();
  DenseMatrix g(n, n);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    for (std::size_t k = 0; k < row.values.size(); ++k) {
      const double scale = row.values[k] * w.inv_row[i];
      const std::size_t j = row.columns[k];
      for (std::size_t c = 0; c < n; ++c) g(j, c) += scale * jf(i, c);
    }
  }
  DenseMatrix out = DenseMatrix::identity(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < n; ++c) out(j, c) -= w.inv_col[j] * g(j, c);
  return out;
}

// ---------------------------------------------------------------------------

double spectral_radius_2x2(const DenseMatrix& m) {
  if (m.rows != 2 || m.cols != 2) throw Error(ErrorKind::DimensionMismatch, "expected a 2x2 matrix");
  const double half_trace = 0.5 * (m(0, 0) + m(1, 1));
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = half_trace * half_trace - det;
  if (disc < 0.0) return std::sqrt(det);
  return std::abs(half_trace) + std::sqrt(disc);
}

std::vector<double> characteristic_polynomial(const DenseMatrix& m) {
  require_square(m, "matrix");
  const std::size_t n = m.rows;
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k) / k.
  DenseMatrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    DenseMatrix next = multiply(m, mk);
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[k - 1];
    mk = std::move(next);
    const DenseMatrix amk = multiply(m, mk);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += amk(i, i);
    c[k] = -trace / static_cast<double>(k);
  }
  return c;
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> monic) {
  if (monic.empty() || monic[0] != 1.0) {
    throw Error(ErrorKind::InvalidArgument, "polynomial must be monic with leading coefficient 1");
  }
  const std::size_t n = monic.size() - 1;
  std::vector<std::complex<double>> z(n);
  if (n == 0) return z;

  double radius = 0.0;
  for (std::size_t k = 1; k <= n; ++k) radius = std::max(radius, std::abs(monic[k]));
  radius += 1.0;  // Cauchy bound

  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> power = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = radius * power;
    power *= seed;
  }

  for (int iter = 0; iter < 2000; ++iter) {
    double largest_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::complex<double> denom = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      if (denom == 0.0) denom = 1e-300;
      const std::complex<double> step = evaluate_polynomial(monic, z[i]) / denom;
      z[i] -= step;
      largest_step = std::max(largest_step, std::abs(step));
    }
    if (largest_step <= 1e-15 * radius) break;
  }

  // Newton polishing, accepting a step only while it reduces |p|.
  for (auto& root : z) {
    double residual = std::abs(evaluate_polynomial(monic, root));
    for (int iter = 0; iter < 50 && residual > 0.0; ++iter) {
      const std::complex<double> d = evaluate_derivative(monic, root);
      if (d == 0.0) break;
      const std::complex<double> candidate = root - evaluate_polynomial(monic, root) / d;
      const double r = std::abs(evaluate_polynomial(monic, candidate));
      if (!(r < residual)) break;
      root = candidate;
      residual = r;
    }
  }
  return z;
}

std::vector<std::complex<double>> eigenvalues_small(const DenseMatrix& m) {
  require_square(m, "matrix");
  const std::size_t n = m.rows;
  if (n > kMaxSmallEigenDimension) {
    throw Error(ErrorKind::InvalidArgument, "small eigenvalue oracle supports n <= 8, got " + std::to_string(n));
  }
  std::vector<std::complex<double>> out;
  if (n == 1) {
    out = {m(0, 0)};
  } else if (n == 2) {
    const double half_trace = 0.5 * (m(0, 0) + m(1, 1));
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const std::complex<double> root = std::sqrt(std::complex<double>(half_trace * half_trace - det, 0.0));
    out = {half_trace + root, half_trace - root};
  } else if (n > 2) {
    const auto c = characteristic_polynomial(m);
    out = polynomial_roots(c);
  }
  std::stable_sort(out.begin(), out.end(), [](auto x, auto y) { return std::abs(x) > std::abs(y); });
  return out;
}

double spectral_radius_small(const DenseMatrix& m) {
  if (m.rows == 2 && m.cols == 2) return spectral_radius_2x2(m);
  const auto ev = eigenvalues_small(m);
  return ev.empty() ? 0.0 : std::abs(ev.front());
}

// ---------------------------------------------------------------------------

PowerIterationResult power_iteration(const LinearOperator& op, double tol, std::size_t max_iterations,
                                     std::uint64_t seed) {
  const std::size_t n = op.dimension();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "power iteration needs a non-empty operator");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "power iteration tolerance must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& v : x) v = normal(rng);
    norm = std::sqrt(kernels::dot(x, x));
  }
  for (double& v : x) v /= norm;

  PowerIterationResult result;
  std::vector<double> y(n);
  for (std::size_t k = 1; k <= max_iterations; ++k) {
    op.apply(x, y);
    const double lambda = kernels::dot(x, y);
    const double ynorm = std::sqrt(kernels::dot(y, y));
    if (!std::isfinite(lambda) || !std::isfinite(ynorm)) {
      throw Error(ErrorKind::InvalidArgument, "operator maps the power iterate to a non-finite vector");
    }
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) residual = std::max(residual, std::abs(y[j] - lambda * x[j]));
    result.eigenvalue = lambda;
    result.final_residual = residual;
    result.iterations = k;
    if (residual < tol) {
      result.converged = true;
      break;
    }
    for (std::size_t j = 0; j < n; ++j) x[j] = y[j] / ynorm;
  }
  result.eigenvector = std::move(x);
  return result;
}

std::size_t numerical_rank(const DenseMatrix& m, double pivot_tol) {
  DenseMatrix w = m;
  double scale = 0.0;
  for (double v : w.data) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0;

  std::size_t rank = 0;
  for (std::size_t c = 0; c < w.cols && rank < w.rows; ++c) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < w.rows; ++r) {
      if (std::abs(w(r, c)) > std::abs(w(pivot, c))) pivot = r;
    }
    if (std::abs(w(pivot, c)) <= pivot_tol * scale) continue;
    for (std::size_t j = 0; j < w.cols; ++j) std::swap(w(rank, j), w(pivot, j));
    for (std::size_t r = rank + 1; r < w.rows; ++r) {
      const double f = w(r, c) / w(rank, c);
      if (f == 0.0) continue;
      for (std::size_t j = c; j < w.cols; ++j) w(r, j) -= f * w(rank, j);
    }
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------------------

namespace {

bool strictly_positive(const DenseMatrix& a) {
  return std::all_of(a.data.begin(), a.data.end(), [](double v) { return v > 0.0; });
}

std::string rank_note(const DenseMatrix& a, std::size_t rank) {
  return "rank " + std::to_string(rank) + " < " + std::to_string(a.cols) + " columns; check skipped";
}

// Returns a check marked inapplicable when A is not of full column rank.
bool hypotheses_hold(const DenseMatrix& a, PropertyCheck& check) {
  if (a.cols == 0 || a.rows < a.cols) {
    check.detail = "needs m >= n >= 1; check skipped";
    return false;
  }
  const std::size_t rank = numerical_rank(a);
  if (rank < a.cols) {
    check.detail = rank_note(a, rank);
    return false;
  }
  check.applicable = true;
  return true;
}

}  // namespace

PropertyCheck check_row_sum_bound(const DenseMatrix& a, double tol) {
  PropertyCheck check;
  if (!hypotheses_hold(a, check)) return check;
  const DenseMatrix w = sart_update_matrix(SystemMatrix::dense(a));
  const bool positive = strictly_positive(a);
  double worst_excess = -1.0;
  for (std::size_t j = 0; j < w.rows; ++j) {
    double sum = 0.0;
    for (double v : w.row(j)) sum += v;
    check.measure = std::max(check.measure, std::abs(sum - 1.0));
    worst_excess = std::max(worst_excess, sum - 1.0);
  }
  check.passed = positive ? check.measure <= tol : worst_excess <= tol;
  check.detail = positive ? "row sums equal 1 for strictly positive A" : "row sums bounded by 1";
  return check;
}

PropertyCheck check_positive_real_spectrum(const DenseMatrix& a, double imag_tol) {
  PropertyCheck check;
  if (!hypotheses_hold(a, check)) return check;
  const DenseMatrix w = sart_update_matrix(SystemMatrix::dense(a));
  if (w.rows > kMaxSmallEigenDimension) {
    check.applicable = false;
    check.detail = "n > 8; check skipped";
    return check;
  }
  bool positive = true;
  for (const auto& ev : eigenvalues_small(w)) {
    check.measure = std::max(check.measure, std::abs(ev.imag()));
    positive = positive && ev.real() > 0.0;
  }
  check.passed = positive && check.measure < imag_tol;
  check.detail = positive ? "eigenvalues of W have positive real parts" : "W has an eigenvalue with real part <= 0";
  return check;
}

PropertyCheck check_sart_contraction(const DenseMatrix& a) {
  PropertyCheck check;
  if (!hypotheses_hold(a, check)) return check;
  const DenseMatrix t = sart_iteration_matrix(SystemMatrix::dense(a));
  if (t.rows > kMaxSmallEigenDimension) {
    check.applicable = false;
    check.detail = "n > 8; check skipped";
    return check;
  }
  check.measure = spectral_radius_small(t);
  check.passed = check.measure < 1.0;
  check.detail = "spectral radius of T";
  return check;
}

SartPropertyReport verify_sart_properties(const DenseMatrix& a) {
  SartPropertyReport report;
  report.rank = numerical_rank(a);
  report.full_rank = a.cols > 0 && report.rank == a.cols;
  report.row_sums = check_row_sum_bound(a);
  report.spectrum = check_positive_real_spectrum(a);
  report.contraction = check_sart_contraction(a);
  return report;
}

// ---------------------------------------------------------------------------

SolverConfig ConvergenceMapConfig::default_solver() {
  SolverConfig s;
  s.max_iterations = 5000;
  s.convergence_tol = 1e-8;
  return s;
}

void ConvergenceMapConfig::validate() const {
  if (grid_size < 2) throw Error(ErrorKind::InvalidArgument, "grid_size must be at least 2");
  if (!(t1_max > t1_min) || !(t2_max > t2_min)) {
    throw Error(ErrorKind::InvalidArgument, "convergence map ranges must have max > min");
  }
  if (!std::isfinite(t1_min) || !std::isfinite(t1_max) || !std::isfinite(t2_min) || !std::isfinite(t2_max)) {
    throw Error(ErrorKind::InvalidArgument, "convergence map ranges must be finite");
  }
  solver.validate();
}

double ConvergenceMap::agreement(double margin) const {
  std::size_t counted = 0;
  std::size_t matching = 0;
  for (std::size_t c = 0; c < spectral_radius.size(); ++c) {
    const double rho = spectral_radius[c];
    if (!(std::abs(rho - 1.0) > margin)) continue;
    ++counted;
    if ((rho < 1.0) == converged(c)) ++matching;
  }
  return counted == 0 ? 1.0 : static_cast<double>(matching) / static_cast<double>(counted);
}

namespace {

std::vector<double> grid_nodes(double lo, double hi, std::size_t count, std::span<const double> avoid) {
  const double step = (hi - lo) / static_cast<double>(count - 1);
  std::vector<double> nodes(count);
  for (std::size_t k = 0; k < count; ++k) {
    double v = lo + step * static_cast<double>(k);
    for (double b : avoid) {
      if (std::abs(v - b) < 1e-6) v = b + 0.01 * step;
    }
    nodes[k] = v;
  }
  return nodes;
}

}  // namespace

ConvergenceMap convergence_map(const ConvergenceMapConfig& config, const LacModel& model, const Spectrum& spectrum) {
  config.validate();
  const std::size_t g = config.grid_size;
  ConvergenceMap map;
  map.grid_size = g;
  map.t1 = grid_nodes(config.t1_min, config.t1_max, g, model.reference_lacs());
  map.t2 = grid_nodes(config.t2_min, config.t2_max, g, model.reference_lacs());
  map.spectral_radius.assign(g * g, 0.0);
  map.status.assign(g * g, RunStatus::MaxIterations);

  const SystemMatrix a = SystemMatrix::dense(two_pixel_matrix());
  const PolyenergeticProjector projector(a, model, spectrum);

  parallel_for(0, g * g, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t cell = lo; cell < hi; ++cell) {
      const std::vector<double> truth{map.t1[cell % g], map.t2[cell / g]};
      const Sinogram p{projector.project(truth), SinogramKind::Intensity};
      map.spectral_radius[cell] = spectral_radius_2x2(iteration_jacobian(projector, truth));
      const PsartIteration step(a, model, spectrum, p);
      map.status[cell] = run(step, 2, config.solver).status;
    }
  });
  return map;
}

double discontinuity_ratio(const ConvergenceMap& map, std::span<const double> boundaries) {
  const std::size_t g = map.grid_size;
  auto separated = [&](double x, double y) {
    for (double b : boundaries) {
      if ((x < b) != (y < b)) return true;
    }
    return false;
  };
  double across = 0.0;
  double within = 0.0;
  std::size_t n_across = 0;
  std::size_t n_within = 0;
  auto tally = [&](std::size_t c0, std::size_t c1, double x0, double x1) {
    const double d = std::abs(map.spectral_radius[c1] - map.spectral_radius[c0]);
    if (separated(x0, x1)) {
      across += d;
      ++n_across;
    } else {
      within += d;
      ++n_within;
    }
  };
  for (std::size_t i2 = 0; i2 < g; ++i2) {
    for (std::size_t i1 = 0; i1 + 1 < g; ++i1) tally(i2 * g + i1, i2 * g + i1 + 1, map.t1[i1], map.t1[i1 + 1]);
  }
  for (std::size_t i2 = 0; i2 + 1 < g; ++i2) {
    for (std::size_t i1 = 0; i1 < g; ++i1) tally(i2 * g + i1, (i2 + 1) * g + i1, map.t2[i2], map.t2[i2 + 1]);
  }
  if (n_across == 0 || n_within == 0 || within == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "grid does not straddle the boundaries on both sides");
  }
  return (across / static_cast<double>(n_across)) / (within / static_cast<double>(n_within));
}

}  // namespace polysart
