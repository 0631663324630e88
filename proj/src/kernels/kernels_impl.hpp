#pragma once

#include <cstddef>
#include <cstdint>

namespace polysart::kernels {

#define POLYSART_DECLARE_KERNELS                                                                  \
  double dot(const double* x, const double* y, std::size_t n);                                   \
  void axpy(double a, const double* x, double* y, std::size_t n);                                \
  void hadamard(const double* x, const double* y, double* out, std::size_t n);                   \
  double max_abs_diff(const double* x, const double* y, std::size_t n);                          \
  double gather_dot(const double* values, const std::uint32_t* index, const double* x,           \
                    std::size_t n);                                                              \
  void scatter_axpy(double a, const double* values, const std::uint32_t* index, double* y,       \
                    std::size_t n);

namespace scalar {
POLYSART_DECLARE_KERNELS
}
namespace avx2 {
POLYSART_DECLARE_KERNELS
}
namespace neon {
POLYSART_DECLARE_KERNELS
}

#undef POLYSART_DECLARE_KERNELS

}  // namespace polysart::kernels
