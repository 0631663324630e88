#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <stdexcept>
#include <vector>

#include "polysart/parallel.hpp"
#include "polysart/projection.hpp"
#include "support/fixtures.hpp"

using namespace polysart;

namespace {

class ThreadGuard {
 public:
  ~ThreadGuard() { set_thread_count(0); }
};

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
  ThreadGuard guard;
  for (unsigned threads : {1u, 2u, 5u}) {
    set_thread_count(threads);
    std::vector<std::atomic<int>> hits(1003);
    parallel_for(0, hits.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) hits[i]++;
    });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, EmptyRangeRunsNothing) {
  bool called = false;
  parallel_for(5, 5, [&](std::size_t, std::size_t) { called = true; });
  EXPECT_FALSE(called);
}

TEST(ParallelFor, RethrowsWorkerException) {
  ThreadGuard guard;
  set_thread_count(4);
  EXPECT_THROW(parallel_for(0, 100, [](std::size_t lo, std::size_t) {
                 if (lo > 0) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(ParallelFor, ThreadCountDefaultsToHardware) {
  ThreadGuard guard;
  set_thread_count(3);
  EXPECT_EQ(thread_count(), 3u);
  set_thread_count(0);
  EXPECT_GE(thread_count(), 1u);
}

TEST(ParallelFor, ProjectionIsIndependentOfThreadCount) {
  ThreadGuard guard;
  const auto a = SystemMatrix::parallel_beam(ParallelBeamGeometry::standard(32, 40, 0.8));
  std::mt19937_64 rng(3);
  const auto x = fixtures::random_vector(a.cols(), rng);
  const auto y = fixtures::random_vector(a.rows(), rng);
  set_thread_count(1);
  std::vector<double> f1(a.rows()), b1(a.cols());
  a.apply(x, f1);
  a.apply_transpose(y, b1);
  set_thread_count(4);
  std::vector<double> f4(a.rows()), b4(a.cols());
  a.apply(x, f4);
  a.apply_transpose(y, b4);
  EXPECT_EQ(f1, f4);
  EXPECT_EQ(b1, b4);
}
