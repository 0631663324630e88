// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace polysart::kernels::avx2 {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline double horizontal_max(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + k + 4), _mm256_loadu_pd(y + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k), acc0);
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) sum += x[k] * y[k];
  return sum;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) y[k] += a * x[k];
}

void hadamard(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) out[k] = x[k] * y[k];
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d best = _mm256_setzero_pd();
  __m256d nan_seen = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d =
        _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
    best = _mm256_max_pd(best, d);
  }
  if (_mm256_movemask_pd(nan_seen) != 0) return std::nan("");
  double m = horizontal_max(best);
  for (; k < n; ++k) {
    const double d = std::fabs(x[k] - y[k]);
    if (d > m || std::isnan(d)) m = d;
  }
  return m;
}

double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                  std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index + k));
    const __m256d gathered = _mm256_i32gather_pd(x, idx, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(values + k), gathered, acc);
  }
  double sum = horizontal_sum(acc);
  for (; k < n; ++k) sum += values[k] * x[index[k]];
  return sum;
}

// AVX2 has no scatter; the scalar loop is the implementation.
void scatter_axpy(double a, const double* values, const std::uint32_t* index, double* y,
                  std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[index[k]] += a * values[k];
}

}  // namespace polysart::kernels::avx2
