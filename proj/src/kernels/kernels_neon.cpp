#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace polysart::kernels::neon {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + k), vld1q_f64(y + k));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + k + 2), vld1q_f64(y + k + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) sum += x[k] * y[k];
  return sum;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) vst1q_f64(y + k, vfmaq_f64(vld1q_f64(y + k), va, vld1q_f64(x + k)));
  for (; k < n; ++k) y[k] += a * x[k];
}

void hadamard(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) vst1q_f64(out + k, vmulq_f64(vld1q_f64(x + k), vld1q_f64(y + k)));
  for (; k < n; ++k) out[k] = x[k] * y[k];
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  // FMAX and FMAXV propagate NaN, matching the scalar reference
  float64x2_t best = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) best = vmaxq_f64(best, vabdq_f64(vld1q_f64(x + k), vld1q_f64(y + k)));
  double m = vmaxvq_f64(best);
  for (; k < n; ++k) {
    const double d = std::fabs(x[k] - y[k]);
    if (d > m || std::isnan(d)) m = d;
  }
  return m;
}

double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                  std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const double pair[2] = {x[index[k]], x[index[k + 1]]};
    acc = vfmaq_f64(acc, vld1q_f64(values + k), vld1q_f64(pair));
  }
  double sum = vaddvq_f64(acc);
  for (; k < n; ++k) sum += values[k] * x[index[k]];
  return sum;
}

void scatter_axpy(double a, const double* values, const std::uint32_t* index, double* y,
                  std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[index[k]] += a * values[k];
}

}  // namespace polysart::kernels::neon
