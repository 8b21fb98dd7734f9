#include "dtq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dtq/counting.hpp"
#include "dtq/errors.hpp"

namespace dtq {

namespace {

// log2(2^a + 2^b) without overflow or underflow.
double log2_sum(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

}  // namespace

BoundValue BoundValue::from_log2(double log2_value) {
  BoundValue b;
  b.log2 = log2_value;
  b.raw = std::exp2(log2_value);
  b.clamped = std::min(b.raw, 1.0);
  return b;
}

void TailParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("epsilon must lie in (0, 1)");
  if (!(delta >= 0.0)) throw UsageError("delta must be >= 0");
  if (!(leaves >= 1.0)) throw UsageError("leaf count must be >= 1");
  if (!(eta >= 0.0)) throw UsageError("eta must be >= 0");
}

double shi_lower_bound(double s_bar, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw UsageError("shi bound: epsilon must lie in [0, 1/2]");
  if (!(s_bar >= 0.0)) throw UsageError("shi bound: s_bar must be >= 0");
  const double margin = 1.0 - 2.0 * epsilon;
  return 0.5 * margin * margin * s_bar;
}

BoundValue mcdiarmid_tail(double leaves, double eta, double delta) {
  if (!(leaves >= 1.0)) throw UsageError("mcdiarmid: L must be >= 1");
  if (!(eta >= 0.0) || !(delta >= 0.0)) throw UsageError("mcdiarmid: eta and delta must be >= 0");
  if (delta == 0.0) return BoundValue::from_log2(0.0);
  if (eta == 0.0) {
    BoundValue b = BoundValue::from_log2(-std::numeric_limits<double>::infinity());
    b.note = "eta = 0: g is constant";
    return b;
  }
  const double exponent = 2.0 * delta * delta / (leaves * eta * eta);
  return BoundValue::from_log2(-exponent * std::numbers::log2e);
}

Dyadic lipschitz_term(int depth) {
  if (depth < 0) throw UsageError("lipschitz_term: negative depth");
  return Dyadic(depth).scaled(1 - depth);
}

Dyadic lipschitz_bound(const LeafProfile& profile) {
  Dyadic best;
  for (int d : profile.depths) best = std::max(best, lipschitz_term(d));
  return best;
}

bool in_leaf_depth_range(int d, double h) {
  if (d < 1) return false;
  return h <= d - std::log2(static_cast<double>(d)) - 2.0;
}

BoundValue leaf_depth_tail(int d, double h) {
  BoundValue b = BoundValue::from_log2(1.0 - std::exp2(d - h - 2.0));
  b.in_range = in_leaf_depth_range(d, h);
  if (!b.in_range) b.note = "outside lemma range: h > d - log2(d) - 2";
  return b;
}

bool leaf_depth_tail_dominates(int d, int h) {
  const mpq_class p = low_leaf_probability(d, h);
  const int m = d - h - 2;
  // For m < 0 the bound exceeds 1.
  if (m < 0) return p <= 1;
  // p <= 2 / 2^(2^m)  <=>  num * 2^(2^m) <= 2 den
  mpz_class lhs = p.get_num();
  mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), mp_bitcnt_t{1} << m);
  return lhs <= 2 * p.get_den();
}

Theorem1Tail theorem1_tail(int d, double epsilon) {
  if (d < 0) throw UsageError("theorem1: d must be >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("theorem1: epsilon must lie in (0, 1)");
  const double third = d / 3.0;
  Theorem1Tail t;
  t.threshold = (1.0 - epsilon) * third;
  t.leaf_term = BoundValue::from_log2(1.0 - std::exp2(third - 2.0));
  t.concentration_term =
      BoundValue::from_log2(-std::exp2(third - 3.0) * epsilon * epsilon * std::numbers::log2e);
  t.total = BoundValue::from_log2(log2_sum(t.leaf_term.log2, t.concentration_term.log2));
  if (t.total.raw >= 1.0) t.total.note = "vacuous (>= 1)";
  return t;
}

double alpha_for(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("alpha: epsilon must lie in (0, 1)");
  return (1.0 - epsilon) / 54.0;
}

LooseTail loose_tail(int d, double c) {
  LooseTail t;
  t.c = c;
  if (d < 2) {
    t.flagged = true;
    t.total = BoundValue::from_log2(0.0);
    t.total.in_range = false;
    t.total.note = "d below range";
    return t;
  }
  const double log_d = std::log2(static_cast<double>(d));
  t.h = d - c * log_d;
  t.delta = log_d;
  t.threshold = t.h / 2.0 - t.delta;
  // Every leaf deeper than h >= 1/ln 2 keeps depth * 2^(1-depth) below h 2^(1-h).
  t.eta = t.h >= 2.0 ? t.h * std::exp2(1.0 - t.h) : 1.0;

  t.leaf_term = leaf_depth_tail(d, t.h);
  t.concentration_term = mcdiarmid_tail(std::exp2(static_cast<double>(d)), t.eta, t.delta);
  t.total = BoundValue::from_log2(log2_sum(t.leaf_term.log2, t.concentration_term.log2));
  t.flagged = t.h < 2.0 || !t.leaf_term.in_range || t.threshold <= 0.0;
  t.total.in_range = !t.flagged;
  if (t.flagged) t.total.note = "d below range for c";
  return t;
}

}  // namespace dtq
