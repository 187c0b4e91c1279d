#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "riccap/parallel.hpp"
#include "riccap/rng.hpp"

namespace riccap {
namespace {

TEST(Splitmix, KnownSequenceFromZero) {
  // First outputs of the reference SplitMix64 generator seeded with 0.
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(g(), 0x06c45d188009454fULL);
}

TEST(Substreams, ArePureFunctionsOfMasterAndIndex) {
  EXPECT_EQ(substream_seed(5, 9), substream_seed(5, 9));
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 8; ++m) {
    for (std::uint64_t s = 0; s < 256; ++s) seen.insert(substream_seed(m, s));
  }
  EXPECT_EQ(seen.size(), 8u * 256u);
}

TEST(NormalStream, ReproducibleAndStandardized) {
  NormalStream a(1, 2), b(1, 2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
  NormalStream s(3, 0);
  const int n = 200'000;
  double m = 0.0, v = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.next();
    m += x;
    v += x * x;
  }
  m /= n;
  v = v / n - m * m;
  EXPECT_LE(std::abs(m), 4.0 / std::sqrt(n));
  EXPECT_LE(std::abs(v - 1.0), 4.0 * std::sqrt(2.0 / n));
}

TEST(NormalStream, NeighbouringStreamsAreUncorrelated) {
  NormalStream a(7, 0), b(7, 1);
  const int n = 100'000;
  double c = 0.0;
  for (int i = 0; i < n; ++i) c += a.next() * b.next();
  EXPECT_LE(std::abs(c / n), 4.0 / std::sqrt(n));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned workers : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, workers);
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsAfterJoining) {
  std::atomic<int> done{0};
  EXPECT_THROW(parallel_for(
                   100,
                   [&](std::size_t i) {
                     if (i == 17) throw std::runtime_error("boom");
                     done++;
                   },
                   4),
               std::runtime_error);
  EXPECT_EQ(done.load(), 99);
}

TEST(WorkerCount, HonoursEnvironmentCap) {
  setenv("RICCATI_CAPACITY_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1u);
  setenv("RICCATI_CAPACITY_THREADS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  unsetenv("RICCATI_CAPACITY_THREADS");
}

}  // namespace
}  // namespace riccap
