#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "polysart/error.hpp"
#include "polysart/kernels.hpp"
#include "polysart/reconstruction.hpp"
#include "support/fixtures.hpp"

using namespace polysart;
namespace k = polysart::kernels;

namespace {

std::vector<k::Backend> simd_backends() {
  std::vector<k::Backend> out;
  for (auto b : {k::Backend::Avx2, k::Backend::Neon})
    if (k::supported(b)) out.push_back(b);
  return out;
}

// Restores the active backend when a test changes it.
class BackendGuard {
 public:
  BackendGuard() : saved_(k::active().backend) {}
  ~BackendGuard() { k::select(saved_); }

 private:
  k::Backend saved_;
};

double sum_abs_products(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] * y[i]);
  return s;
}

}  // namespace

TEST(Kernels, ScalarAlwaysSupported) {
  EXPECT_TRUE(k::supported(k::Backend::Scalar));
  EXPECT_EQ(k::table(k::Backend::Scalar).backend, k::Backend::Scalar);
}

TEST(Kernels, ParseBackendNames) {
  EXPECT_EQ(k::parse_backend("scalar"), k::Backend::Scalar);
  EXPECT_EQ(k::parse_backend("avx2"), k::Backend::Avx2);
  EXPECT_EQ(k::parse_backend("neon"), k::Backend::Neon);
  EXPECT_EQ(k::parse_backend("auto"), k::best_available());
  EXPECT_THROW(k::parse_backend("sse9"), Error);
}

TEST(Kernels, UnsupportedBackendThrows) {
  for (auto b : {k::Backend::Avx2, k::Backend::Neon}) {
    if (!k::supported(b)) EXPECT_THROW(k::table(b), Error);
  }
}

TEST(Kernels, SelectChangesActiveTable) {
  BackendGuard guard;
  k::select(k::Backend::Scalar);
  EXPECT_EQ(k::active().backend, k::Backend::Scalar);
  k::select(k::best_available());
  EXPECT_EQ(k::active().backend, k::best_available());
}

TEST(KernelEquivalence, ReductionsMatchScalar) {
  const auto& ref = k::table(k::Backend::Scalar);
  std::mt19937_64 rng(11);
  for (auto backend : simd_backends()) {
    const auto& simd = k::table(backend);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto x = fixtures::random_vector(n, rng);
      const auto y = fixtures::random_vector(n, rng);
      const double scale = sum_abs_products(x, y) + 1e-300;
      EXPECT_LE(std::abs(simd.dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)), 1e-14 * scale)
          << k::name(backend) << " n=" << n;
      EXPECT_EQ(simd.max_abs_diff(x.data(), y.data(), n), ref.max_abs_diff(x.data(), y.data(), n));
    }
  }
}

TEST(KernelEquivalence, ElementwiseMatchScalar) {
  const auto& ref = k::table(k::Backend::Scalar);
  std::mt19937_64 rng(12);
  for (auto backend : simd_backends()) {
    const auto& simd = k::table(backend);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto x = fixtures::random_vector(n, rng);
      const auto y0 = fixtures::random_vector(n, rng);
      auto y_ref = y0, y_simd = y0;
      ref.axpy(0.37, x.data(), y_ref.data(), n);
      simd.axpy(0.37, x.data(), y_simd.data(), n);
      std::vector<double> h_ref(n), h_simd(n);
      ref.hadamard(x.data(), y0.data(), h_ref.data(), n);
      simd.hadamard(x.data(), y0.data(), h_simd.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        // a fused multiply-add may differ from the scalar result by one rounding
        EXPECT_NEAR(y_simd[i], y_ref[i], 4e-16 * (std::abs(y0[i]) + std::abs(0.37 * x[i])));
        EXPECT_EQ(h_simd[i], h_ref[i]);
      }
    }
  }
}

TEST(KernelEquivalence, GatherScatterMatchScalar) {
  const auto& ref = k::table(k::Backend::Scalar);
  std::mt19937_64 rng(13);
  for (auto backend : simd_backends()) {
    const auto& simd = k::table(backend);
    for (std::size_t n = 0; n <= 45; ++n) {
      const std::size_t width = 3 * n + 5;
      std::vector<std::uint32_t> index(width);
      std::iota(index.begin(), index.end(), 0u);
      std::shuffle(index.begin(), index.end(), rng);
      index.resize(n);
      const auto values = fixtures::random_vector(n, rng);
      const auto x = fixtures::random_vector(width, rng);
      double scale = 1e-300;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(values[i] * x[index[i]]);
      EXPECT_LE(std::abs(simd.gather_dot(values.data(), index.data(), x.data(), n) -
                         ref.gather_dot(values.data(), index.data(), x.data(), n)),
                1e-14 * scale);
      auto y_ref = x, y_simd = x;
      ref.scatter_axpy(-1.5, values.data(), index.data(), y_ref.data(), n);
      simd.scatter_axpy(-1.5, values.data(), index.data(), y_simd.data(), n);
      for (std::size_t i = 0; i < width; ++i) EXPECT_NEAR(y_simd[i], y_ref[i], 1e-15 * (1.0 + std::abs(x[i])));
    }
  }
}

TEST(KernelEquivalence, MaxAbsDiffPropagatesNaN) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto backend : {k::Backend::Scalar, k::Backend::Avx2, k::Backend::Neon}) {
    if (!k::supported(backend)) continue;
    const auto& t = k::table(backend);
    for (std::size_t pos = 0; pos < 11; ++pos) {
      std::vector<double> x(11, 1.0), y(11, 0.0);
      x[pos] = nan;
      EXPECT_TRUE(std::isnan(t.max_abs_diff(x.data(), y.data(), x.size()))) << k::name(backend) << " " << pos;
    }
    EXPECT_EQ(t.max_abs_diff(nullptr, nullptr, 0), 0.0);
  }
}

TEST(KernelEquivalence, SartRunAgreesAcrossBackends) {
  BackendGuard guard;
  const auto a = SystemMatrix::parallel_beam(ParallelBeamGeometry::standard(16, 24, 1.0));
  std::mt19937_64 rng(14);
  const AttenuationMap truth{fixtures::random_vector(a.cols(), rng, 0.0, 0.3)};
  const Sinogram b = forward(a, truth);

  auto run_with = [&](k::Backend backend) {
    k::select(backend);
    const SartIteration step(a, b);
    AttenuationMap x{std::vector<double>(a.cols(), 0.0)};
    for (int i = 0; i < 20; ++i) x = step(x);
    return x.values;
  };
  const auto ref = run_with(k::Backend::Scalar);
  for (auto backend : simd_backends()) {
    const auto got = run_with(backend);
    for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_NEAR(got[j], ref[j], 1e-12);
  }
}
