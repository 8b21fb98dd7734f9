#pragma once

#include <vector>

#include "dtq/dyadic.hpp"
#include "dtq/random.hpp"

namespace dtq {

/// Counts are exact up to this depth; beyond it they throw CapacityError.
inline constexpr int kMaxCountDepth = 20;

enum class CountClass {
  Shapes,          ///< N_d: full binary trees of depth <= d
  Structures,      ///< C(d, v): variable-labeled, leaves open
  Labeled,         ///< F(d, v): variable- and leaf-labeled
  MinDepthShapes,  ///< G_h(d): shapes whose leaves all lie deeper than h
};

/// N_0 = 1, N_d = N_{d-1}^2 + 1.
BigCount count_shapes(int d);
/// C(0, v) = 1, C(d, v) = 1 + v C(d-1, v-1)^2. Requires v >= d.
BigCount count_structures(int d, int v);
/// F(0, v) = 2, F(d, v) = 2 + v F(d-1, v-1)^2. Requires v >= d.
BigCount count_labeled(int d, int v);
/// G_h(d) = N_d for h < 0, G_h(0) = 0 for h >= 0, else G_{h-1}(d-1)^2.
BigCount count_min_depth_shapes(int d, int h);

/// 1 - G_h(d) / N_d: exact probability that a uniform shape of depth <= d
/// has some leaf at depth <= h.
mpq_class low_leaf_probability(int d, int h);

/// Exact count of one class along a single chain of subproblems: entry k
/// is the count for depth budget k with v - (d - k) variables available.
/// That is the only family of subproblems a sampler of (d, v) ever visits,
/// because counts depend on how many variables remain, not which.
class CountTable {
 public:
  /// `v` is ignored for Shapes. MinDepthShapes is not tabulated here.
  CountTable(CountClass cls, int d, int v);

  const BigCount& at(int depth_budget) const { return counts_.at(static_cast<std::size_t>(depth_budget)); }
  int depth() const noexcept { return static_cast<int>(counts_.size()) - 1; }
  CountClass count_class() const noexcept { return cls_; }

 private:
  CountClass cls_;
  std::vector<BigCount> counts_;
};

/// Structures of depth <= d over v variables split by leaf count: entry L
/// is the number with exactly L leaves (entry 0 is always zero).
std::vector<BigCount> structures_by_leaf_count(int d, int v);

/// Exactly uniform in [0, bound) by rejection on fixed-width bit blocks.
/// Consumes no randomness when bound == 1.
BigCount uniform_below(const BigCount& bound, RandomStream& rng);

}  // namespace dtq
