#include <gtest/gtest.h>

#include <set>

#include "marginsel/rng.hpp"

using namespace marginsel;

TEST(CounterRng, SameInputsGiveSameBits) {
  const CounterRng a(42, kSampleStream), b(42, kSampleStream);
  for (std::uint64_t i = 0; i < 1000; ++i) EXPECT_EQ(a.bits(i), b.bits(i));
}

TEST(CounterRng, StreamsAndSeedsDiffer) {
  const CounterRng a(42, kSampleStream), b(42, kRademacherStream), c(43, kSampleStream);
  int same_ab = 0, same_ac = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    same_ab += a.bits(i) == b.bits(i);
    same_ac += a.bits(i) == c.bits(i);
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(CounterRng, UniformInUnitIntervalWithRightMean) {
  const CounterRng rng(7);
  double sum = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform(i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // sd of the mean is sqrt(1/12 / count) ~ 6.5e-4
  EXPECT_NEAR(sum / count, 0.5, 4e-3);
}

TEST(CounterRng, RademacherIsBalancedSign) {
  const CounterRng rng(11, kRademacherStream);
  long sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const int e = rng.rademacher(i);
    ASSERT_TRUE(e == 1 || e == -1);
    sum += e;
  }
  EXPECT_LT(std::abs(sum), 1500); // 4.7 sd
}

TEST(DeriveSeed, DistinctAcrossIndices) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(1, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}
