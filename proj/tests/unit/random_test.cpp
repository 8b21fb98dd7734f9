#include <set>

#include <gtest/gtest.h>

#include "dtq/random.hpp"

using dtq::RandomStream;

TEST(RandomStream, SameSeedSameWords) {
  RandomStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto wa = a.next_word();
    EXPECT_EQ(wa, b.next_word());
    differs |= wa != c.next_word();
  }
  EXPECT_TRUE(differs);
}

TEST(RandomStream, SubstreamDependsOnlyOnKeyAndIndex) {
  RandomStream a(7);
  a.next_word();  // consuming words must not change derived substreams
  const RandomStream b(7);
  RandomStream sa = a.substream(3), sb = b.substream(3);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sa.next_word(), sb.next_word());

  std::set<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 1000; ++i) keys.insert(b.substream(i).key());
  EXPECT_EQ(keys.size(), 1000U);
}

TEST(RandomStream, UniformBelowStaysInRange) {
  RandomStream r(1);
  for (std::uint64_t bound : {1ULL, 2ULL, 3ULL, 1000ULL, (1ULL << 63) + 5}) {
    for (int i = 0; i < 200; ++i) EXPECT_LT(r.uniform_below(bound), bound);
  }
}

TEST(RandomStream, BitsAreBalanced) {
  RandomStream r(9);
  int ones = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) ones += r.next_bit();
  // 5 sigma of a fair coin over 10^5 draws is about 790.
  EXPECT_NEAR(ones, kDraws / 2, 800);
}
