#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polysart/materials.hpp"
#include "polysart/spectra.hpp"

namespace polysart {

/// Row-major dense matrix for small systems and analysis results.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  DenseMatrix(std::size_t r, std::size_t c, std::vector<double> values);

  static DenseMatrix identity(std::size_t n);

  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x);

/// Attenuation values at the reference energy, cm^-1, one per pixel.
struct AttenuationMap {
  std::vector<double> values;
};

enum class SinogramKind { Intensity, LineIntegral };

struct Sinogram {
  std::vector<double> values;
  SinogramKind kind = SinogramKind::LineIntegral;
};

/// 2D parallel-beam acquisition over an N x N pixel grid centred on the
/// origin. Pixel (r, c) has index r * N + c with row 0 at the top. View v is
/// at angle v * pi / view_count; its rays are the lines
/// x cos(theta) + y sin(theta) = s for detector offsets s centred on zero.
struct ParallelBeamGeometry {
  std::size_t image_size = 0;
  double pixel_pitch_cm = 1.0;
  std::size_t view_count = 0;
  std::size_t detector_count = 0;
  double detector_pitch_cm = 1.0;

  /// detector_count = N and detector_pitch = pixel_pitch.
  static ParallelBeamGeometry standard(std::size_t image_size, std::size_t views, double pixel_pitch_cm);

  std::size_t pixel_count() const { return image_size * image_size; }
  std::size_t ray_count() const { return view_count * detector_count; }
  double angle(std::size_t view) const;
  double detector_offset(std::size_t detector) const;
  void validate() const;
};

/// Exact ray/pixel intersection lengths of one ray, ordered by pixel index.
struct RayIntersections {
  std::vector<std::uint32_t> pixels;
  std::vector<double> lengths_cm;
};

/// Siddon traversal of ray (view, detector). Lengths below 1e-9 pixel pitch
/// (corner grazes) are dropped.
RayIntersections trace_ray(const ParallelBeamGeometry& geometry, std::size_t view, std::size_t detector);

/// System matrix A with non-negative entries, stored both by row and by
/// column so that A x and A^T y are each computed as independent gathers with
/// a fixed summation order per output element. The two products are exact
/// transposes of each other.
class SystemMatrix {
 public:
  static SystemMatrix dense(const DenseMatrix& a);
  static SystemMatrix parallel_beam(const ParallelBeamGeometry& geometry);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return row_values_.size(); }
  bool is_dense() const { return !geometry_.has_value(); }
  const std::optional<ParallelBeamGeometry>& geometry() const { return geometry_; }

  struct Row {
    std::span<const double> values;
    std::span<const std::uint32_t> columns;
  };
  Row row(std::size_t i) const;

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_transpose(std::span<const double> y, std::span<double> x) const;

  DenseMatrix to_dense() const;

 private:
  SystemMatrix() = default;
  void build_columns();

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::optional<ParallelBeamGeometry> geometry_;
  std::vector<std::size_t> row_start_;
  std::vector<std::uint32_t> row_columns_;
  std::vector<double> row_values_;
  std::vector<std::size_t> col_start_;
  std::vector<std::uint32_t> col_rows_;
  std::vector<double> col_values_;
};

Sinogram forward(const SystemMatrix& a, const AttenuationMap& x);
std::vector<double> backproject(const SystemMatrix& a, const Sinogram& y);

/// 1-norms of rows (gamma) or columns (beta). `empty` flags entries that are
/// exactly zero: such rays or pixels take no part in SART updates.
struct AbsoluteSums {
  std::vector<double> values;
  std::vector<bool> empty;
};

AbsoluteSums row_sums(const SystemMatrix& a);
AbsoluteSums col_sums(const SystemMatrix& a);

/// Diagonals of the SART weighting matrices: inv_row = 1/gamma (M) and
/// inv_col = 1/beta (D), with zero wherever the sum is zero.
struct SartWeights {
  std::vector<double> inv_row;
  std::vector<double> inv_col;
};

SartWeights sart_weights(const SystemMatrix& a);

/// Polyenergetic forward model: ray i measures
///   sum_h I_h exp(-<a_i, mu(t, e_h)>)
/// with mu applied pixelwise through the LAC model.
class PolyenergeticProjector {
 public:
  /// Keeps a reference to `a`, which must outlive the projector.
  PolyenergeticProjector(const SystemMatrix& a, const LacModel& model, Spectrum spectrum);

  struct Evaluation {
    std::vector<double> intensity;       // per ray
    std::vector<double> line_integrals;  // [ray * energy_count + h]
    std::vector<std::size_t> segments;   // LAC segment of each pixel
  };

  const SystemMatrix& system() const { return *a_; }
  const LacTable& table() const { return table_; }
  const Spectrum& spectrum() const { return spectrum_; }
  std::size_t energy_count() const { return weights_.size(); }
  double weight(std::size_t h) const { return weights_[h]; }

  Evaluation evaluate(std::span<const double> t) const;
  std::vector<double> project(std::span<const double> t) const { return evaluate(t).intensity; }

  /// Intensity of a single ray; used by row-action iterations.
  double project_ray(std::size_t ray, std::span<const double> t) const;

 private:
  const SystemMatrix* a_;
  Spectrum spectrum_;
  LacTable table_;
  std::vector<double> weights_;
};

Sinogram poly_project(const SystemMatrix& a, const LacModel& model, const Spectrum& spectrum,
                      const AttenuationMap& t);

/// b_i = -ln(p_i / sum_h I_h).
Sinogram post_log(const Sinogram& intensity, const Spectrum& spectrum);

}  // namespace polysart
