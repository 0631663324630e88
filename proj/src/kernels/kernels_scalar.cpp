#include <cmath>

#include "kernels_impl.hpp"

namespace polysart::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += x[k] * y[k];
  return sum;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += a * x[k];
}

void hadamard(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = x[k] * y[k];
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::fabs(x[k] - y[k]);
    // NaN must propagate so a diverged iterate is never mistaken for a fixed point
    if (d > m || std::isnan(d)) m = d;
  }
  return m;
}

double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                  std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += values[k] * x[index[k]];
  return sum;
}

void scatter_axpy(double a, const double* values, const std::uint32_t* index, double* y,
                  std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[index[k]] += a * values[k];
}

}  // namespace polysart::kernels::scalar
