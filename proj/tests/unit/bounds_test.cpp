#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dtq/bounds.hpp"
#include "dtq/counting.hpp"
#include "dtq/errors.hpp"
#include "dtq/tree.hpp"

using namespace dtq;

namespace {

void expect_rel(double actual, double expected, double tol = 1e-12) {
  EXPECT_LE(std::abs(actual - expected), tol * std::abs(expected)) << actual << " vs " << expected;
}

}  // namespace

TEST(Shi, Examples) {
  expect_rel(shi_lower_bound(18, 1.0 / 3.0), 1.0);
  EXPECT_EQ(shi_lower_bound(7.5, 0.5), 0.0);
  EXPECT_EQ(shi_lower_bound(4, 0.0), 2.0);
  EXPECT_THROW(shi_lower_bound(1, 0.6), UsageError);
  EXPECT_THROW(shi_lower_bound(-1, 0.1), UsageError);
}

TEST(Shi, MonotoneInSbarDecreasingInEpsilon) {
  for (double eps = 0.0; eps <= 0.5; eps += 0.05) {
    for (double s = 0.0; s < 20.0; s += 0.5) {
      EXPECT_LE(shi_lower_bound(s, eps), shi_lower_bound(s + 0.5, eps));
      if (eps + 0.05 <= 0.5) EXPECT_GE(shi_lower_bound(s, eps), shi_lower_bound(s, eps + 0.05));
    }
  }
}

TEST(McDiarmid, Examples) {
  EXPECT_EQ(mcdiarmid_tail(10, 0.3, 0.0).raw, 1.0);
  expect_rel(mcdiarmid_tail(2, 1, 1).raw, std::exp(-1.0));
  EXPECT_EQ(mcdiarmid_tail(4, 0.0, 1.0).raw, 0.0);
  EXPECT_EQ(mcdiarmid_tail(4, 0.0, 0.0).raw, 1.0);
  EXPECT_THROW(mcdiarmid_tail(0.5, 1, 1), UsageError);
  EXPECT_THROW(mcdiarmid_tail(2, -1, 1), UsageError);
}

TEST(McDiarmid, ChainSubstitution) {
  // L = 2^d and eta from leaves at depth >= 2d/3 give exp(-(9/8) 2^(d/3) delta^2 / d^2);
  // delta = eps d / 3 then gives exp(-2^(d/3-3) eps^2). Compared in log2 form.
  for (int d = 3; d <= 60; d += 3) {
    const double eta = lipschitz_term(2 * d / 3).to_double();
    for (double delta : {0.5, 1.0, d / 6.0}) {
      const double got = mcdiarmid_tail(std::exp2(d), eta, delta).log2;
      const double want = -(9.0 / 8.0) * std::exp2(d / 3.0) * delta * delta / (d * d) * std::numbers::log2e;
      expect_rel(got, want);
    }
    const double eps = 0.5;
    const double got = mcdiarmid_tail(std::exp2(d), eta, eps * d / 3.0).log2;
    expect_rel(got, -std::exp2(d / 3.0 - 3.0) * eps * eps * std::numbers::log2e);
  }
}

TEST(Lipschitz, Examples) {
  EXPECT_EQ(lipschitz_bound({{0}}), Dyadic(0));
  EXPECT_EQ(lipschitz_bound(leaf_profile(trees::complete_structure(3))), Dyadic(mpz_class(3), 2));
  EXPECT_EQ(lipschitz_bound({{1, 2, 3, 3}}), Dyadic(1));
  EXPECT_EQ(lipschitz_term(2), Dyadic(1));
  EXPECT_EQ(lipschitz_term(5), Dyadic(mpz_class(5), 4));
}

TEST(LeafDepthTail, Examples) {
  const auto b = leaf_depth_tail(6, 1);
  EXPECT_EQ(b.raw, std::exp2(-7.0));
  EXPECT_TRUE(b.in_range);

  const auto trivial = leaf_depth_tail(3, 1);
  EXPECT_EQ(trivial.clamped, 1.0);
  EXPECT_FALSE(trivial.in_range);
  EXPECT_FALSE(trivial.note.empty());
  EXPECT_TRUE(leaf_depth_tail_dominates(3, 1));

  // h = 8 lies outside the range at d = 12 (limit about 6.42), and the bound
  // fails there: 1 - 26^512 / N_12 is about 0.3152.
  const auto d12 = leaf_depth_tail(12, 8);
  EXPECT_EQ(d12.raw, 0.125);
  EXPECT_FALSE(d12.in_range);
  EXPECT_NEAR(nearest_double(low_leaf_probability(12, 8)), 0.31524740004884544, 1e-15);
  EXPECT_FALSE(leaf_depth_tail_dominates(12, 8));
  EXPECT_TRUE(leaf_depth_tail_dominates(12, 6));
}

TEST(LeafDepthTail, RangeBoundary) {
  EXPECT_FALSE(in_leaf_depth_range(0, 0));
  EXPECT_TRUE(in_leaf_depth_range(8, 3));   // 8 - 3 - 2 = 3
  EXPECT_FALSE(in_leaf_depth_range(8, 4));
  EXPECT_TRUE(in_leaf_depth_range(14, 8));  // 14 - log2 14 - 2 = 8.19
  EXPECT_FALSE(in_leaf_depth_range(14, 9));
}

TEST(LeafDepthTail, ExactDominanceInRange) {
  for (int d = 1; d <= 14; ++d) {
    for (int h = 0; in_leaf_depth_range(d, h); ++h) EXPECT_TRUE(leaf_depth_tail_dominates(d, h)) << d << "," << h;
  }
}

TEST(LeafDepthTail, DominanceCheckIsNotVacuous) {
  // Far outside the range the bound is below the exact probability.
  EXPECT_FALSE(leaf_depth_tail_dominates(14, 10));
}

TEST(CombinedTail, Examples) {
  const auto t = theorem1_tail(30, 0.5);
  EXPECT_EQ(t.leaf_term.log2, -255.0);
  expect_rel(t.concentration_term.log2, -32.0 * std::numbers::log2e);
  expect_rel(t.total.raw, std::exp2(-255.0) + std::exp(-32.0));
  EXPECT_EQ(t.threshold, 5.0);

  const auto zero = theorem1_tail(0, 0.5);
  EXPECT_GE(zero.total.raw, 1.0);
  EXPECT_EQ(zero.total.clamped, 1.0);
  EXPECT_EQ(zero.threshold, 0.0);

  const auto d12 = theorem1_tail(12, 0.5);
  expect_rel(d12.total.raw, std::exp2(1.0 - 4.0) + std::exp(-2.0 * 0.25));
  EXPECT_EQ(d12.threshold, 2.0);
}

TEST(CombinedTail, NonMultipleOfThreeUsesRealExponent) {
  const auto t = theorem1_tail(10, 0.5);
  expect_rel(t.leaf_term.log2, 1.0 - std::exp2(10.0 / 3.0 - 2.0));
}

TEST(CombinedTail, DecreasesEveryThreeLevels) {
  for (int d = 9; d <= 300; ++d) {
    EXPECT_LT(theorem1_tail(d + 3, 0.5).total.log2, theorem1_tail(d, 0.5).total.log2) << d;
  }
}

TEST(Alpha, Examples) {
  expect_rel(alpha_for(0.5), 1.0 / 108.0);
  expect_rel(alpha_for(0.1), 1.0 / 60.0);
  EXPECT_LT(alpha_for(1.0 - 1e-12), 1e-13);
  EXPECT_THROW(alpha_for(1.0), UsageError);
}

TEST(LooseTail, SmallWhereLeafDepthRangeHolds) {
  const auto t32 = loose_tail(32, 3.0);
  EXPECT_FALSE(t32.flagged);
  EXPECT_LT(t32.leaf_term.log2, -10.0);
  // At d = 32 the concentration term is still near 1 (L eta^2 is about 289).
  EXPECT_GT(t32.concentration_term.raw, 0.5);

  const auto t64 = loose_tail(64, 3.0);
  EXPECT_FALSE(t64.flagged);
  EXPECT_LT(t64.leaf_term.log2, -10.0);
  EXPECT_LT(t64.concentration_term.log2, -10.0);
  EXPECT_EQ(t64.h, 64 - 3 * 6);
  EXPECT_EQ(t64.threshold, t64.h / 2 - 6);
}

TEST(LooseTail, DecreasesInD) {
  for (int d = 32; d < 400; ++d) {
    EXPECT_LT(loose_tail(d + 1).total.log2, loose_tail(d).total.log2) << d;
  }
}

TEST(LooseTail, FlaggedBelowRange) {
  EXPECT_TRUE(loose_tail(1).flagged);
  EXPECT_TRUE(loose_tail(8).flagged);  // h = 8 - 9 < 2
}
