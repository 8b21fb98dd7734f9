#pragma once

#include <cstdint>
#include <vector>

#include "dtq/dyadic.hpp"
#include "dtq/tree.hpp"

namespace dtq {

/// Largest n accepted by truth_table (2^24 packed bits).
inline constexpr int kMaxTruthTableVars = 24;

/// Packed truth table of f: {0,1}^n -> {0,1}. Input x is the integer whose
/// bit i is x_i, so flipping x_i is x ^ (1 << i).
class TruthTable {
 public:
  explicit TruthTable(int n);

  int vars() const noexcept { return n_; }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << n_; }
  bool get(std::uint64_t x) const noexcept { return (words_[x >> 6] >> (x & 63)) & 1U; }
  void set(std::uint64_t x, bool value) noexcept;
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  int n_;
  std::vector<std::uint64_t> words_;
};

/// Bits fixed along a root path. Each variable is assigned at most once.
class PathContext {
 public:
  PathContext() = default;

  /// Throws UsageError if `var` is already fixed.
  void fix(Var var, bool bit);
  void release(Var var);
  /// -1 when free, else the fixed bit.
  int value(Var var) const noexcept {
    return var < bits_.size() ? bits_[var] : -1;
  }
  std::size_t fixed_count() const noexcept { return fixed_; }

 private:
  std::vector<std::int8_t> bits_;
  std::size_t fixed_ = 0;
};

/// bits[x] = evaluate(tree, x). Throws CapacityError if n > kMaxTruthTableVars
/// and UsageError if the tree queries a variable >= n.
TruthTable truth_table(const DecisionTree& tree, int n);

/// 2^-n * sum_x sum_i |f(x) - f(x^i)|, counted over Hamming edges of the cube.
Dyadic avg_sensitivity_bruteforce(const TruthTable& tt);

/// Pr over the free variables (uniform) that a and b disagree, given ctx.
Dyadic disagreement_probability(const DecisionTree& a, const DecisionTree& b,
                                const PathContext& ctx = {});

/// Exact average sensitivity without enumerating inputs.
///
/// Flipping x_i moves x off its path only at the node of that path that
/// queries i, so s(T) sums, over internal nodes u, Pr[reach u] = 2^-depth(u)
/// times the probability that u's two subtrees disagree given the path bits.
Dyadic avg_sensitivity_structural(const DecisionTree& tree);

/// sum over leaves of depth * 2^-depth: the expected number of queries.
template <class Label>
Dyadic expected_path_length(const QueryTree<Label>& tree) {
  Dyadic sum;
  for_each_leaf(tree, [&](const auto&, int d) { sum += Dyadic(d).scaled(-d); });
  return sum;
}

/// Mean of s(T_z) over all 2^L leaf assignments z: half the expected path length.
template <class Label>
Dyadic expected_sensitivity_over_leaves(const QueryTree<Label>& tree) {
  return expected_path_length(tree).half();
}

}  // namespace dtq
