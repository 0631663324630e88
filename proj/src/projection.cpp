#include "polysart/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "polysart/csv.hpp"
#include "polysart/error.hpp"
#include "polysart/kernels.hpp"
#include "polysart/parallel.hpp"

namespace polysart {
namespace {

void require_size(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected length " +
                                                  std::to_string(expected) + ", got " + std::to_string(actual));
  }
}

constexpr double kAxisEpsilon = 1e-12;

}  // namespace

DenseMatrix::DenseMatrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  require_size(data.size(), r * c, "dense matrix data");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  require_size(b.rows, a.cols, "matrix product inner dimension");
  DenseMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  return out;
}

std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
  require_size(x.size(), a.cols, "matrix-vector product");
  std::vector<double> y(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) y[i] = kernels::dot(a.row(i), x);
  return y;
}

// ---------------------------------------------------------------------------
// Parallel-beam geometry

ParallelBeamGeometry ParallelBeamGeometry::standard(std::size_t image_size, std::size_t views,
                                                    double pixel_pitch_cm) {
  return {image_size, pixel_pitch_cm, views, image_size, pixel_pitch_cm};
}

double ParallelBeamGeometry::angle(std::size_t view) const {
  return std::numbers::pi * static_cast<double>(view) / static_cast<double>(view_count);
}

double ParallelBeamGeometry::detector_offset(std::size_t detector) const {
  return (static_cast<double>(detector) - 0.5 * static_cast<double>(detector_count - 1)) * detector_pitch_cm;
}

void ParallelBeamGeometry::validate() const {
  if (image_size == 0 || view_count == 0 || detector_count == 0) {
    throw Error(ErrorKind::InvalidArgument, "geometry: image size, views and detectors must be positive");
  }
  if (!(pixel_pitch_cm > 0.0) || !(detector_pitch_cm > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "geometry: pixel and detector pitch must be positive");
  }
  if (pixel_count() > std::numeric_limits<std::int32_t>::max()) {
    throw Error(ErrorKind::InvalidArgument, "geometry: image too large for 32-bit pixel indices");
  }
}

RayIntersections trace_ray(const ParallelBeamGeometry& g, std::size_t view, std::size_t detector) {
  const double theta = g.angle(view);
  const double s = g.detector_offset(detector);
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double pitch = g.pixel_pitch_cm;
  const auto n = static_cast<std::ptrdiff_t>(g.image_size);
  const double half = 0.5 * pitch * static_cast<double>(g.image_size);

  // Ray points: x(l) = s cos - l sin, y(l) = s sin + l cos, unit speed in l.
  const double x0 = s * cos_t;
  const double y0 = s * sin_t;
  double l_min = -std::numeric_limits<double>::infinity();
  double l_max = std::numeric_limits<double>::infinity();
  const bool crosses_x = std::fabs(sin_t) > kAxisEpsilon;
  const bool crosses_y = std::fabs(cos_t) > kAxisEpsilon;

  if (crosses_x) {
    const double a = (x0 + half) / sin_t;
    const double b = (x0 - half) / sin_t;
    l_min = std::max(l_min, std::min(a, b));
    l_max = std::min(l_max, std::max(a, b));
  } else if (x0 < -half || x0 >= half) {
    return {};
  }
  if (crosses_y) {
    const double a = (-half - y0) / cos_t;
    const double b = (half - y0) / cos_t;
    l_min = std::max(l_min, std::min(a, b));
    l_max = std::min(l_max, std::max(a, b));
  } else if (y0 <= -half || y0 > half) {
    return {};
  }
  if (!(l_max > l_min)) return {};

  std::vector<double> breaks{l_min, l_max};
  for (std::ptrdiff_t k = 0; k <= n; ++k) {
    const double plane = -half + static_cast<double>(k) * pitch;
    if (crosses_x) {
      const double l = (x0 - plane) / sin_t;
      if (l > l_min && l < l_max) breaks.push_back(l);
    }
    if (crosses_y) {
      const double l = (plane - y0) / cos_t;
      if (l > l_min && l < l_max) breaks.push_back(l);
    }
  }
  std::sort(breaks.begin(), breaks.end());

  const double min_length = 1e-9 * pitch;
  std::vector<std::pair<std::uint32_t, double>> hits;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double length = breaks[k + 1] - breaks[k];
    if (length <= min_length) continue;
    const double mid = 0.5 * (breaks[k] + breaks[k + 1]);
    const auto col = static_cast<std::ptrdiff_t>(std::floor((x0 - mid * sin_t + half) / pitch));
    const auto row = static_cast<std::ptrdiff_t>(std::floor((half - (y0 + mid * cos_t)) / pitch));
    if (col < 0 || col >= n || row < 0 || row >= n) continue;
    hits.emplace_back(static_cast<std::uint32_t>(row * n + col), length);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  RayIntersections out;
  for (const auto& [pixel, length] : hits) {
    if (!out.pixels.empty() && out.pixels.back() == pixel) {
      out.lengths_cm.back() += length;
    } else {
      out.pixels.push_back(pixel);
      out.lengths_cm.push_back(length);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// System matrix

SystemMatrix SystemMatrix::dense(const DenseMatrix& a) {
  require_size(a.data.size(), a.rows * a.cols, "dense system matrix");
  SystemMatrix m;
  m.rows_ = a.rows;
  m.cols_ = a.cols;
  m.row_start_.reserve(a.rows + 1);
  m.row_start_.push_back(0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      const double v = a(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "system matrix entries must be finite and non-negative (entry " +
                                                    std::to_string(i) + "," + std::to_string(j) + ")");
      }
      m.row_columns_.push_back(static_cast<std::uint32_t>(j));
      m.row_values_.push_back(v);
    }
    m.row_start_.push_back(m.row_values_.size());
  }
  m.build_columns();
  return m;
}

SystemMatrix SystemMatrix::parallel_beam(const ParallelBeamGeometry& geometry) {
  geometry.validate();
  SystemMatrix m;
  m.geometry_ = geometry;
  m.rows_ = geometry.ray_count();
  m.cols_ = geometry.pixel_count();

  std::vector<RayIntersections> rays(m.rows_);
  parallel_for(0, m.rows_, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      rays[i] = trace_ray(geometry, i / geometry.detector_count, i % geometry.detector_count);
    }
  });

  m.row_start_.reserve(m.rows_ + 1);
  m.row_start_.push_back(0);
  for (const auto& ray : rays) {
    m.row_columns_.insert(m.row_columns_.end(), ray.pixels.begin(), ray.pixels.end());
    m.row_values_.insert(m.row_values_.end(), ray.lengths_cm.begin(), ray.lengths_cm.end());
    m.row_start_.push_back(m.row_values_.size());
  }
  m.build_columns();
  return m;
}

void SystemMatrix::build_columns() {
  col_start_.assign(cols_ + 1, 0);
  for (std::uint32_t c : row_columns_) ++col_start_[c + 1];
  std::partial_sum(col_start_.begin(), col_start_.end(), col_start_.begin());
  col_rows_.resize(row_columns_.size());
  col_values_.resize(row_values_.size());
  std::vector<std::size_t> cursor(col_start_.begin(), col_start_.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      const std::size_t slot = cursor[row_columns_[k]]++;
      col_rows_[slot] = static_cast<std::uint32_t>(i);
      col_values_[slot] = row_values_[k];
    }
  }
}

SystemMatrix::Row SystemMatrix::row(std::size_t i) const {
  const std::size_t b = row_start_[i];
  const std::size_t len = row_start_[i + 1] - b;
  return {{row_values_.data() + b, len}, {row_columns_.data() + b, len}};
}

void SystemMatrix::apply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), cols_, "forward projection input");
  require_size(y.size(), rows_, "forward projection output");
  const auto& k = kernels::active();
  parallel_for(0, rows_, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t b = row_start_[i];
      y[i] = k.gather_dot(row_values_.data() + b, row_columns_.data() + b, x.data(), row_start_[i + 1] - b);
    }
  }, 256);
}

void SystemMatrix::apply_transpose(std::span<const double> y, std::span<double> x) const {
  require_size(y.size(), rows_, "backprojection input");
  require_size(x.size(), cols_, "backprojection output");
  const auto& k = kernels::active();
  parallel_for(0, cols_, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const std::size_t b = col_start_[j];
      x[j] = k.gather_dot(col_values_.data() + b, col_rows_.data() + b, y.data(), col_start_[j + 1] - b);
    }
  }, 256);
}

DenseMatrix SystemMatrix::to_dense() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) out(i, row_columns_[k]) += row_values_[k];
  return out;
}

Sinogram forward(const SystemMatrix& a, const AttenuationMap& x) {
  Sinogram out{std::vector<double>(a.rows()), SinogramKind::LineIntegral};
  a.apply(x.values, out.values);
  return out;
}

std::vector<double> backproject(const SystemMatrix& a, const Sinogram& y) {
  std::vector<double> out(a.cols());
  a.apply_transpose(y.values, out);
  return out;
}

AbsoluteSums row_sums(const SystemMatrix& a) {
  AbsoluteSums s{std::vector<double>(a.rows()), std::vector<bool>(a.rows())};
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (double v : a.row(i).values) sum += std::fabs(v);
    s.values[i] = sum;
    s.empty[i] = sum == 0.0;
  }
  return s;
}

AbsoluteSums col_sums(const SystemMatrix& a) {
  AbsoluteSums s{std::vector<double>(a.cols(), 0.0), std::vector<bool>(a.cols())};
  // accumulate in row order, the same order apply_transpose uses
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t k = 0; k < r.values.size(); ++k) s.values[r.columns[k]] += std::fabs(r.values[k]);
  }
  for (std::size_t j = 0; j < a.cols(); ++j) s.empty[j] = s.values[j] == 0.0;
  return s;
}

SartWeights sart_weights(const SystemMatrix& a) {
  const auto gamma = row_sums(a);
  const auto beta = col_sums(a);
  SartWeights w{std::vector<double>(a.rows()), std::vector<double>(a.cols())};
  for (std::size_t i = 0; i < a.rows(); ++i) w.inv_row[i] = gamma.empty[i] ? 0.0 : 1.0 / gamma.values[i];
  for (std::size_t j = 0; j < a.cols(); ++j) w.inv_col[j] = beta.empty[j] ? 0.0 : 1.0 / beta.values[j];
  return w;
}

// ---------------------------------------------------------------------------
// Polyenergetic projection

PolyenergeticProjector::PolyenergeticProjector(const SystemMatrix& a, const LacModel& model, Spectrum spectrum)
    : a_(&a),
      spectrum_(std::move(spectrum)),
      table_(model.tabulate(spectrum_.energies())),
      weights_(spectrum_.weights()) {}

PolyenergeticProjector::Evaluation PolyenergeticProjector::evaluate(std::span<const double> t) const {
  require_size(t.size(), a_->cols(), "attenuation map");
  const std::size_t n = a_->cols();
  const std::size_t m = a_->rows();
  const std::size_t energies = energy_count();

  Evaluation ev;
  ev.segments.resize(n);
  for (std::size_t j = 0; j < n; ++j) ev.segments[j] = table_.segment(t[j]);

  ev.line_integrals.resize(m * energies);
  std::vector<double> mu(n);
  std::vector<double> line(m);
  for (std::size_t h = 0; h < energies; ++h) {
    for (std::size_t j = 0; j < n; ++j) mu[j] = table_.value_in_segment(t[j], ev.segments[j], h);
    a_->apply(mu, line);
    for (std::size_t i = 0; i < m; ++i) ev.line_integrals[i * energies + h] = line[i];
  }

  ev.intensity.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double p = 0.0;
    for (std::size_t h = 0; h < energies; ++h) p += weights_[h] * std::exp(-ev.line_integrals[i * energies + h]);
    ev.intensity[i] = p;
  }
  return ev;
}

double PolyenergeticProjector::project_ray(std::size_t ray, std::span<const double> t) const {
  require_size(t.size(), a_->cols(), "attenuation map");
  const auto r = a_->row(ray);
  double p = 0.0;
  for (std::size_t h = 0; h < energy_count(); ++h) {
    double line = 0.0;
    for (std::size_t k = 0; k < r.values.size(); ++k) line += r.values[k] * table_.value(t[r.columns[k]], h);
    p += weights_[h] * std::exp(-line);
  }
  return p;
}

Sinogram poly_project(const SystemMatrix& a, const LacModel& model, const Spectrum& spectrum,
                      const AttenuationMap& t) {
  const PolyenergeticProjector projector(a, model, spectrum);
  for (double v : t.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "attenuation map has non-finite entries");
  }
  return {projector.project(t.values), SinogramKind::Intensity};
}

Sinogram post_log(const Sinogram& intensity, const Spectrum& spectrum) {
  const double blank = spectrum.total_weight();
  Sinogram out{std::vector<double>(intensity.values.size()), SinogramKind::LineIntegral};
  for (std::size_t i = 0; i < intensity.values.size(); ++i) {
    const double p = intensity.values[i];
    if (!(p > 0.0)) {
      throw Error(ErrorKind::NonPositive, "intensity at ray " + std::to_string(i) + " is not positive (" +
                                              csv::format(p) + ")");
    }
    out.values[i] = -std::log(p / blank);
  }
  return out;
}

}  // namespace polysart
