#include <atomic>
#include <string>

#include "kernels_impl.hpp"
#include "polysart/error.hpp"
#include "polysart/kernels.hpp"

namespace polysart::kernels {
namespace {

constexpr KernelTable kScalar{Backend::Scalar,         scalar::dot,        scalar::axpy,
                              scalar::hadamard,        scalar::max_abs_diff, scalar::gather_dot,
                              scalar::scatter_axpy};

#if defined(POLYSART_HAVE_AVX2)
constexpr KernelTable kAvx2{Backend::Avx2,        avx2::dot,          avx2::axpy,
                            avx2::hadamard,       avx2::max_abs_diff, avx2::gather_dot,
                            avx2::scatter_axpy};
#endif

#if defined(POLYSART_HAVE_NEON)
constexpr KernelTable kNeon{Backend::Neon,        neon::dot,          neon::axpy,
                            neon::hadamard,       neon::max_abs_diff, neon::gather_dot,
                            neon::scatter_axpy};
#endif

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

bool supported(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(POLYSART_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(POLYSART_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend best_available() {
  if (supported(Backend::Avx2)) return Backend::Avx2;
  if (supported(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

const KernelTable& table(Backend backend) {
  if (!supported(backend)) {
    throw Error(ErrorKind::InvalidArgument,
                "kernel backend '" + std::string(name(backend)) + "' is not available on this machine");
  }
  switch (backend) {
#if defined(POLYSART_HAVE_AVX2)
    case Backend::Avx2:
      return kAvx2;
#endif
#if defined(POLYSART_HAVE_NEON)
    case Backend::Neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

const KernelTable& active() {
  const KernelTable* current = g_active.load(std::memory_order_acquire);
  if (current == nullptr) {
    current = &table(best_available());
    g_active.store(current, std::memory_order_release);
  }
  return *current;
}

void select(Backend backend) { g_active.store(&table(backend), std::memory_order_release); }

std::string_view name(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view text) {
  if (text == "scalar") return Backend::Scalar;
  if (text == "avx2") return Backend::Avx2;
  if (text == "neon") return Backend::Neon;
  if (text == "auto") return best_available();
  throw Error(ErrorKind::InvalidArgument, "unknown kernel backend '" + std::string(text) + "'");
}

}  // namespace polysart::kernels
