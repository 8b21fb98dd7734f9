#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "dtq/counting.hpp"
#include "dtq/errors.hpp"
#include "support/oracles.hpp"

using namespace dtq;

TEST(Counting, ShapesMatchEnumeration) {
  const long expected[] = {1, 2, 5, 26, 677};
  for (int d = 0; d <= 4; ++d) {
    EXPECT_EQ(count_shapes(d), expected[d]);
    EXPECT_EQ(count_shapes(d), oracle::all_shapes(d).size());
  }
}

TEST(Counting, ShapesGrowDoublyExponentially) {
  for (int d = 1; d <= 16; ++d) {
    mpz_class lower;
    mpz_setbit(lower.get_mpz_t(), mp_bitcnt_t{1} << (d - 1));
    EXPECT_GE(count_shapes(d), lower) << "d=" << d;
    EXPECT_EQ(count_shapes(d), count_shapes(d - 1) * count_shapes(d - 1) + 1);
  }
}

TEST(Counting, StructuresAndLabeledMatchEnumeration) {
  for (int d = 0; d <= 3; ++d) {
    for (int v = d; v <= 4; ++v) {
      const auto vars = oracle::first_vars(v);
      EXPECT_EQ(count_structures(d, v), oracle::all_structures(d, vars).size()) << d << "," << v;
      EXPECT_EQ(count_labeled(d, v), oracle::all_trees(d, vars).size()) << d << "," << v;
    }
  }
}

TEST(Counting, NamedValues) {
  EXPECT_EQ(count_structures(0, 5), 1);
  EXPECT_EQ(count_structures(1, 3), 4);
  EXPECT_EQ(count_structures(2, 2), 9);
  EXPECT_EQ(count_labeled(0, 7), 2);
  EXPECT_EQ(count_labeled(1, 1), 6);
  EXPECT_EQ(count_labeled(2, 2), 74);
  EXPECT_EQ(count_min_depth_shapes(2, 0), 4);
  EXPECT_EQ(count_min_depth_shapes(3, 1), 16);
  EXPECT_EQ(low_leaf_probability(3, 1), mpq_class(5, 13));  // 10 of 26 shapes
}

TEST(Counting, MinDepthShapesMatchEnumeration) {
  for (int d = 0; d <= 4; ++d) {
    EXPECT_EQ(count_min_depth_shapes(d, -1), count_shapes(d));
    for (int h = 0; h <= d + 1; ++h) {
      EXPECT_EQ(count_min_depth_shapes(d, h), oracle::shapes_with_min_leaf_depth_above(d, h))
          << "d=" << d << " h=" << h;
    }
  }
}

TEST(Counting, Preconditions) {
  EXPECT_THROW(count_structures(3, 2), UsageError);
  EXPECT_THROW(count_labeled(3, 2), UsageError);
  EXPECT_THROW(count_shapes(-1), UsageError);
  EXPECT_THROW(count_shapes(kMaxCountDepth + 1), CapacityError);
  EXPECT_NO_THROW(count_shapes(kMaxCountDepth));
}

TEST(Counting, TableFollowsTheVariableChain) {
  const CountTable labeled(CountClass::Labeled, 4, 6);
  for (int k = 0; k <= 4; ++k) EXPECT_EQ(labeled.at(k), count_labeled(k, 6 - 4 + k));
  const CountTable shapes(CountClass::Shapes, 5, 0);
  for (int k = 0; k <= 5; ++k) EXPECT_EQ(shapes.at(k), count_shapes(k));
  EXPECT_THROW(CountTable(CountClass::MinDepthShapes, 3, 3), UsageError);
}

TEST(Counting, StructuresByLeafCountMatchEnumeration) {
  for (int d = 0; d <= 3; ++d) {
    for (int v = d; v <= 4; ++v) {
      std::map<std::size_t, long> hist;
      for (const auto& s : oracle::all_structures(d, oracle::first_vars(v))) ++hist[leaf_count(s)];
      const auto table = structures_by_leaf_count(d, v);
      EXPECT_EQ(table[0], 0);
      BigCount total = 0;
      for (std::size_t l = 1; l < table.size(); ++l) {
        EXPECT_EQ(table[l], hist[l]) << "d=" << d << " v=" << v << " L=" << l;
        total += table[l];
      }
      EXPECT_EQ(total, count_structures(d, v));
    }
  }
}

TEST(UniformBelow, DegenerateBoundsAndRange) {
  RandomStream r(3);
  const RandomStream untouched(3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(uniform_below(BigCount(1), r), 0);
  // bound 1 consumes no randomness
  RandomStream copy = untouched;
  EXPECT_EQ(r.next_word(), copy.next_word());

  const BigCount big = (BigCount(1) << 130) + 17;
  for (int i = 0; i < 200; ++i) {
    const BigCount v = uniform_below(big, r);
    EXPECT_GE(v, 0);
    EXPECT_LT(v, big);
  }
  EXPECT_THROW(uniform_below(BigCount(0), r), UsageError);
}

TEST(UniformBelow, FairBitAndChiSquareOnFive) {
  RandomStream r(77);
  constexpr int kDraws = 100000;
  long hist[5] = {};
  for (int i = 0; i < kDraws; ++i) ++hist[uniform_below(BigCount(5), r).get_ui()];
  double chi2 = 0;
  for (long c : hist) chi2 += (c - kDraws / 5.0) * (c - kDraws / 5.0) / (kDraws / 5.0);
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(4), chi2));
  EXPECT_GT(p, 1e-3) << "chi2=" << chi2;

  long ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += uniform_below(BigCount(2), r).get_si();
  EXPECT_NEAR(ones, kDraws / 2, 800);
}
