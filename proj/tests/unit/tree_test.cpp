#include <vector>

#include <gtest/gtest.h>

#include "dtq/errors.hpp"
#include "dtq/random.hpp"
#include "dtq/sampler.hpp"
#include "dtq/tree.hpp"
#include "support/oracles.hpp"

using namespace dtq;

namespace {

DecisionTree leaf(bool b) { return DecisionTree::leaf(b); }
DecisionTree q(Var v, DecisionTree a, DecisionTree b) { return DecisionTree::query(v, std::move(a), std::move(b)); }

std::vector<std::uint8_t> x(std::initializer_list<int> bits) {
  std::vector<std::uint8_t> out;
  for (int b : bits) out.push_back(static_cast<std::uint8_t>(b));
  return out;
}

DecisionTree complete_tree(int d, bool label) { return assemble(trees::complete_structure(d), {std::vector<bool>(std::size_t{1} << d, label)}); }

}  // namespace

TEST(Evaluate, ConstantDictatorAnd) {
  EXPECT_TRUE(evaluate(leaf(true), x({0, 1})).value);
  EXPECT_EQ(evaluate(leaf(true), x({0, 1})).path_length, 0);

  const auto dict = trees::dictator(0);
  EXPECT_TRUE(evaluate(dict, x({1, 0})).value);
  EXPECT_FALSE(evaluate(dict, x({0, 1})).value);

  const auto and_tree = q(0, leaf(false), q(1, leaf(false), leaf(true)));
  EXPECT_EQ(and_tree, trees::and2(0, 1));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto r = evaluate(and_tree, x({a, b}));
      EXPECT_EQ(r.value, a == 1 && b == 1);
      EXPECT_EQ(r.path_length, a == 1 ? 2 : 1);
    }
  }
}

TEST(Evaluate, ShortInputIsAUsageError) {
  EXPECT_THROW(evaluate(trees::and2(0, 1), x({1})), UsageError);
}

TEST(Evaluate, PathLengthIsDepthOfReachedLeaf) {
  RandomStream root(11);
  const TreeSampler sampler(Model::FullUniform, 5, 6);
  for (std::uint64_t i = 0; i < 50; ++i) {
    RandomStream rng = root.substream(i);
    const auto tree = sampler(rng);
    for (std::uint64_t input = 0; input < 64; ++input) {
      const auto bits = oracle::bits_of(input, 6);
      const auto r = evaluate(tree, bits);
      // walk by hand to the leaf and compare
      const DecisionTree* t = &tree;
      int depth = 0;
      while (!t->is_leaf()) {
        t = &t->child(bits[t->var()] != 0);
        ++depth;
      }
      EXPECT_EQ(r.path_length, depth);
      EXPECT_EQ(r.value, t->label());
    }
  }
}

TEST(Validate, ReportsEachKindOfViolation) {
  const auto repeated = q(0, q(0, leaf(false), leaf(true)), leaf(true));
  const auto v = validate(repeated, 2, 2);
  ASSERT_EQ(v.size(), 1U);
  EXPECT_EQ(v[0].kind, Violation::Kind::RepeatedVariable);
  EXPECT_EQ(v[0].message, "variable 0 repeated on path");

  EXPECT_TRUE(is_valid(complete_tree(2, false), 2, 2));

  const auto deep = complete_tree(3, false);
  const auto dv = validate(deep, 3, 2);
  ASSERT_FALSE(dv.empty());
  EXPECT_EQ(dv[0].kind, Violation::Kind::DepthExceeded);
  EXPECT_NE(dv[0].message.find("exceeds bound"), std::string::npos);

  const auto out_of_range = validate(trees::dictator(5), 3, 2);
  ASSERT_EQ(out_of_range.size(), 1U);
  EXPECT_EQ(out_of_range[0].kind, Violation::Kind::VariableOutOfRange);
  EXPECT_EQ(out_of_range[0].var, 5U);
}

TEST(Validate, SameVariableInSiblingSubtreesIsFine) {
  EXPECT_TRUE(is_valid(q(0, trees::dictator(1), trees::dictator(1)), 2, 2));
}

TEST(LeafProfile, Examples) {
  EXPECT_EQ(leaf_profile(leaf(true)).depths, std::vector<int>{0});
  EXPECT_EQ(leaf_profile(trees::complete_structure(2)).depths, (std::vector<int>{2, 2, 2, 2}));
  // a x0 + (1 - x0) x1 x2: depth-first order lists the chain side first.
  const auto profile = leaf_profile(trees::tightness_family(3, false));
  EXPECT_EQ(profile.depths, (std::vector<int>{2, 3, 3, 1}));
  std::vector<int> sorted = profile.depths;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{1, 2, 3, 3}));
  EXPECT_EQ(profile.depths[trees::tightness_leaf_index(3)], 1);
}

TEST(LeafProfile, KraftEqualityOnEveryShapeUpToDepthThree) {
  for (const auto& shape : oracle::all_shapes(3)) {
    // build a Structure with that shape to reuse leaf_profile
    auto build = [](auto&& self, const Shape& s, Var v) -> Structure {
      if (s.is_leaf()) return Structure::leaf();
      return Structure::query(v, self(self, s.left(), v + 1), self(self, s.right(), v + 1));
    };
    const auto st = build(build, shape, 0);
    EXPECT_EQ(leaf_profile(st).kraft_sum(), Dyadic(1));
    EXPECT_EQ(shape_of(st), shape);
    EXPECT_EQ(shape.depth(), depth(st));
    EXPECT_EQ(shape.leaf_count(), leaf_count(st));
  }
}

TEST(Assembly, DisassembleInvertsAssemble) {
  RandomStream root(5);
  for (Model m : kAllModels) {
    const TreeSampler sampler(m, 6, 8);
    for (std::uint64_t i = 0; i < 40; ++i) {
      RandomStream rng = root.substream(i);
      const auto tree = sampler(rng);
      const auto [s, z] = disassemble(tree);
      EXPECT_EQ(z.size(), leaf_count(s));
      EXPECT_EQ(assemble(s, z), tree);
      const auto again = disassemble(assemble(s, z));
      EXPECT_EQ(again.first, s);
      EXPECT_EQ(again.second, z);
    }
  }
  EXPECT_THROW(assemble(trees::complete_structure(2), {std::vector<bool>(3)}), UsageError);
}

TEST(Assembly, FlipChangesExactlyOneLeaf) {
  const auto tree = trees::tightness_family(5, false);
  const auto before = assignment_of(tree);
  for (std::size_t k = 0; k < before.size(); ++k) {
    const auto flipped = with_leaf_flipped(tree, k);
    auto expected = before;
    expected.bits[k] = !expected.bits[k];
    EXPECT_EQ(assignment_of(flipped), expected);
    EXPECT_EQ(structure_of(flipped), structure_of(tree));
    EXPECT_EQ(with_leaf_flipped(flipped, k), tree);
  }
  EXPECT_THROW(with_leaf_flipped(tree, before.size()), UsageError);
}

TEST(Trees, TightnessFamilyComputesItsFormula) {
  for (int alpha = 0; alpha < 2; ++alpha) {
    const auto tree = trees::tightness_family(4, alpha == 1);
    for (std::uint64_t input = 0; input < 16; ++input) {
      const auto b = oracle::bits_of(input, 4);
      const bool expected = b[0] ? alpha == 1 : (b[1] && b[2] && b[3]);
      EXPECT_EQ(evaluate(tree, b).value, expected);
    }
  }
}
