#pragma once

#include <string>

#include "dtq/dyadic.hpp"
#include "dtq/tree.hpp"

namespace dtq {

/// A probability bound in three forms. `log2` stays finite when `raw`
/// underflows (e.g. 2^(1-2^40)), so compare tiny bounds through it.
struct BoundValue {
  double raw = 1.0;
  double clamped = 1.0;  ///< min(raw, 1)
  double log2 = 0.0;
  bool in_range = true;  ///< false when the underlying lemma does not apply
  std::string note;

  static BoundValue from_log2(double log2_value);
};

/// Parameters of the concentration chain; validate() enforces
/// 0 < epsilon < 1, delta >= 0, leaves >= 1, eta >= 0.
struct TailParams {
  int d = 0;
  double h = 0.0;
  double epsilon = 0.5;
  double delta = 0.0;
  double leaves = 1.0;
  double eta = 0.0;

  void validate() const;
};

/// q >= (1/2)(1 - 2 eps)^2 * s_bar for any q-query algorithm with worst-case
/// error eps <= 1/2. With eps = 1/3 this is s_bar / 18.
double shi_lower_bound(double s_bar, double epsilon);

/// exp(-2 delta^2 / (L eta^2)) bounds Pr[g < E g - delta] for g on {0,1}^L
/// changing by at most eta per coordinate. eta = 0 gives 0 (delta > 0) or 1.
BoundValue mcdiarmid_tail(double leaves, double eta, double delta);

/// depth * 2^(1 - depth): the change in average sensitivity caused by
/// flipping one leaf at that depth is at most this much.
Dyadic lipschitz_term(int depth);
/// Max of lipschitz_term over the profile.
Dyadic lipschitz_bound(const LeafProfile& profile);

/// True iff h <= d - log2(d) - 2 (the range where leaf_depth_tail is proven).
bool in_leaf_depth_range(int d, double h);
/// 2^(1 - 2^(d-h-2)) bounds Pr[a uniform depth-<=d tree has a leaf at depth
/// <= h]. Out-of-range h still gets the formula value, with in_range = false.
BoundValue leaf_depth_tail(int d, double h);

/// Exact check that low_leaf_probability(d, h) <= 2^(1 - 2^(d-h-2)).
bool leaf_depth_tail_dominates(int d, int h);

struct Theorem1Tail {
  double threshold = 0.0;  ///< (1 - eps) d / 3
  BoundValue leaf_term;    ///< 2^(1 - 2^(d/3 - 2)): some leaf at depth <= 2d/3
  BoundValue concentration_term;  ///< exp(-2^(d/3 - 3) eps^2)
  BoundValue total;
};

/// Bound on Pr_T[s(T) < (1 - eps) d / 3]. d/3 is real-valued.
Theorem1Tail theorem1_tail(int d, double epsilon);

/// (1 - eps) / 54: Q2 >= s/18 combined with s >= (1 - eps) d / 3.
double alpha_for(double epsilon);

/// Looser two-term tail with h = d - c log2(d), deviation delta = log2(d)
/// and threshold h/2 - delta = d/2 - O(log d).
struct LooseTail {
  double c = 3.0;
  double h = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double threshold = 0.0;
  BoundValue leaf_term;
  BoundValue concentration_term;
  BoundValue total;
  bool flagged = false;  ///< h < 2, h outside the leaf-depth range, or threshold <= 0
};

LooseTail loose_tail(int d, double c = 3.0);

}  // namespace dtq
