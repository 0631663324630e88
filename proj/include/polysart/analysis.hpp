#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polysart/materials.hpp"
#include "polysart/projection.hpp"
#include "polysart/reconstruction.hpp"
#include "polysart/spectra.hpp"

namespace polysart {

/// Square linear map given only by its action.
class LinearOperator {
 public:
  using Apply = std::function<void(std::span<const double> x, std::span<double> y)>;

  LinearOperator(std::size_t dimension, Apply apply);
  static LinearOperator from_dense(DenseMatrix m);

  std::size_t dimension() const { return dimension_; }
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator()(std::span<const double> x) const;

  /// Materializes the operator column by column; intended for small n.
  DenseMatrix to_dense() const;

 private:
  std::size_t dimension_;
  Apply apply_;
};

// SART linear map x -> x - D A^T M (A x - b), written as T x + c with
// W = D A^T M A and T = I - W. The dense forms are intended for small systems.

DenseMatrix sart_update_matrix(const SystemMatrix& a);
DenseMatrix sart_iteration_matrix(const SystemMatrix& a);
LinearOperator sart_iteration_operator(const SystemMatrix& a);

// Jacobians of the polyenergetic residual f(t) = -ln P(t) + ln p and of the
// pSART map F(t) = t - D A^T M f(t). Derivatives of the LAC model at an exact
// material value use the half-open bracket convention.

/// m x n matrix with entries a_ij * sum_h pi_ih * dmu/dt(t_j, e_h), where
/// pi_ih = I_h exp(-<a_i, mu(t, e_h)>) / P_i(t). Throws Error(NonPositive) if
/// any P_i(t) underflows to zero.
DenseMatrix residual_jacobian(const PolyenergeticProjector& projector, std::span<const double> t);

/// I - D A^T M J_f(t), matrix-free. Costs one forward projection per occupied
/// LAC segment plus one backprojection per application.
LinearOperator iteration_jacobian_operator(const PolyenergeticProjector& projector, std::span<const double> t);

/// Dense I - D A^T M J_f(t); intended for small n.
DenseMatrix iteration_jacobian(const PolyenergeticProjector& projector, std::span<const double> t);

// Small-matrix eigenvalue oracles.

/// Largest eigenvalue magnitude of a 2 x 2 matrix from its characteristic
/// polynomial; sqrt(det) for a complex pair.
double spectral_radius_2x2(const DenseMatrix& m);

/// Coefficients c of det(lambda I - M) = lambda^n + c[1] lambda^(n-1) + ... +
/// c[n], with c[0] = 1.
std::vector<double> characteristic_polynomial(const DenseMatrix& m);

/// All complex roots of a monic polynomial in the layout above, by
/// Durand-Kerner iteration followed by Newton polishing of each root.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> monic);

constexpr std::size_t kMaxSmallEigenDimension = 8;

/// Eigenvalues of an n x n matrix with n <= 8, ordered by decreasing
/// magnitude.
std::vector<std::complex<double>> eigenvalues_small(const DenseMatrix& m);
double spectral_radius_small(const DenseMatrix& m);

struct PowerIterationResult {
  double eigenvalue = 0.0;  // Rayleigh quotient <x, op x> with |x|_2 = 1
  std::vector<double> eigenvector;
  std::size_t iterations = 0;
  double final_residual = 0.0;  // max |op x - eigenvalue x|
  bool converged = false;
};

/// Power iteration from a seeded random unit vector; stops once
/// max |op x - lambda x| < tol. A dominant complex pair never meets the
/// stopping rule and is reported with converged = false. Throws
/// Error(InvalidArgument) if the operator produces non-finite values.
PowerIterationResult power_iteration(const LinearOperator& op, double tol, std::size_t max_iterations,
                                     std::uint64_t seed);

/// Rank by Gaussian elimination with partial pivoting; pivots whose magnitude
/// is at most pivot_tol times the largest entry count as zero.
std::size_t numerical_rank(const DenseMatrix& m, double pivot_tol = 1e-12);

// Numerical checks of the SART convergence argument for dense full-column-rank
// A: row sums of W are at most 1 (exactly 1 for strictly positive A), W has a
// real positive spectrum, and rho(T) < 1.

struct PropertyCheck {
  bool applicable = false;  // false when A violates the hypotheses
  bool passed = false;
  double measure = 0.0;
  std::string detail;
};

/// measure: largest |row sum of W - 1|.
PropertyCheck check_row_sum_bound(const DenseMatrix& a, double tol = 1e-12);
/// measure: largest |imaginary part| over the eigenvalues of W.
PropertyCheck check_positive_real_spectrum(const DenseMatrix& a, double imag_tol = 1e-9);
/// measure: rho(T).
PropertyCheck check_sart_contraction(const DenseMatrix& a);

struct SartPropertyReport {
  std::size_t rank = 0;
  bool full_rank = false;
  PropertyCheck row_sums;
  PropertyCheck spectrum;
  PropertyCheck contraction;

  bool all_passed() const { return full_rank && row_sums.passed && spectrum.passed && contraction.passed; }
};

SartPropertyReport verify_sart_properties(const DenseMatrix& a);

// Convergence map of pSART on the two-pixel object.

struct ConvergenceMapConfig {
  double t1_min = 0.02;
  double t1_max = 0.30;
  double t2_min = 0.02;
  double t2_max = 0.30;
  std::size_t grid_size = 60;
  SolverConfig solver = default_solver();

  static SolverConfig default_solver();
  void validate() const;
};

/// Cell (i1, i2) sits at index i2 * grid_size + i1, with t1 varying fastest.
struct ConvergenceMap {
  std::size_t grid_size = 0;
  std::vector<double> t1;
  std::vector<double> t2;
  std::vector<double> spectral_radius;
  std::vector<RunStatus> status;

  bool converged(std::size_t cell) const { return status[cell] == RunStatus::Converged; }

  /// Fraction of cells with |rho - 1| > margin whose outcome matches rho < 1.
  double agreement(double margin) const;
};

/// Grid nodes are evenly spaced; a node that falls within 1e-6 of a material
/// reference value is moved 1% of the grid step upward.
ConvergenceMap convergence_map(const ConvergenceMapConfig& config, const LacModel& model, const Spectrum& spectrum);

/// Mean |delta rho| between neighbouring cells separated by one of the
/// boundaries, divided by the mean over neighbours not separated by any.
double discontinuity_ratio(const ConvergenceMap& map, std::span<const double> boundaries);

}  // namespace polysart
