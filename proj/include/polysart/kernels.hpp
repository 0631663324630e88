#pragma once

// Vector kernels used by the projectors and iterations. Every kernel has a
// scalar reference implementation; SIMD variants (AVX2+FMA on x86-64, NEON on
// aarch64) are selected at runtime and tested for equivalence against it.
//
// Backends differ only in floating-point summation order. A given backend is
// deterministic: results do not depend on thread count or call history.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace polysart::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  Backend backend;
  // sum_k x[k] * y[k]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = x .* y
  void (*hadamard)(const double* x, const double* y, double* out, std::size_t n);
  // max_k |x[k] - y[k]|, 0 for n == 0
  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
  // sum_k values[k] * x[index[k]]
  double (*gather_dot)(const double* values, const std::uint32_t* index, const double* x,
                       std::size_t n);
  // y[index[k]] += a * values[k]; indices within one call must be distinct
  void (*scatter_axpy)(double a, const double* values, const std::uint32_t* index, double* y,
                       std::size_t n);
};

bool supported(Backend backend);
Backend best_available();

/// Kernel table for a specific backend. Throws Error(InvalidArgument) if the
/// backend was not compiled in or the CPU lacks the instructions.
const KernelTable& table(Backend backend);

/// Currently selected table; defaults to best_available() on first use.
const KernelTable& active();
void select(Backend backend);

std::string_view name(Backend backend);
Backend parse_backend(std::string_view text);  // "scalar", "avx2", "neon", "auto"

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

inline void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  active().hadamard(x.data(), y.data(), out.data(), x.size());
}

inline double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  return active().max_abs_diff(x.data(), y.data(), x.size());
}

}  // namespace polysart::kernels
