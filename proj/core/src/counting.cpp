#include "dtq/counting.hpp"

#include <string>

#include "dtq/errors.hpp"

namespace dtq {

namespace {

void check_depth(int d) {
  if (d < 0) throw UsageError("depth must be nonnegative, got " + std::to_string(d));
  if (d > kMaxCountDepth) {
    throw CapacityError("depth " + std::to_string(d) + " exceeds count cap " +
                        std::to_string(kMaxCountDepth));
  }
}

void check_vars(int d, int v) {
  check_depth(d);
  if (v < d) {
    throw UsageError("need at least d variables: d=" + std::to_string(d) + ", v=" + std::to_string(v));
  }
}

// x_k = base + (v - d + k) * x_{k-1}^2, x_0 = base; multiplier 1 for shapes.
std::vector<BigCount> chain(int d, int v, unsigned long base, bool labeled_vars) {
  std::vector<BigCount> out(static_cast<std::size_t>(d) + 1);
  out[0] = base;
  for (int k = 1; k <= d; ++k) {
    BigCount sq = out[k - 1] * out[k - 1];
    if (labeled_vars) sq *= static_cast<unsigned long>(v - d + k);
    out[k] = sq + base;
  }
  return out;
}

}  // namespace

BigCount count_shapes(int d) {
  check_depth(d);
  return chain(d, d, 1, false).back();
}

BigCount count_structures(int d, int v) {
  check_vars(d, v);
  return chain(d, v, 1, true).back();
}

BigCount count_labeled(int d, int v) {
  check_vars(d, v);
  return chain(d, v, 2, true).back();
}

BigCount count_min_depth_shapes(int d, int h) {
  check_depth(d);
  if (h < 0) return count_shapes(d);
  if (h >= d) return 0;  // the recursion bottoms out at G_{h-d}(0) = 0
  BigCount g = count_shapes(d - h - 1);
  for (int i = 0; i <= h; ++i) g *= g;
  return g;
}

mpq_class low_leaf_probability(int d, int h) {
  const BigCount total = count_shapes(d);
  mpq_class p(total - count_min_depth_shapes(d, h), total);
  p.canonicalize();
  return p;
}

CountTable::CountTable(CountClass cls, int d, int v) : cls_(cls) {
  switch (cls) {
    case CountClass::Shapes:
      check_depth(d);
      counts_ = chain(d, d, 1, false);
      break;
    case CountClass::Structures:
      check_vars(d, v);
      counts_ = chain(d, v, 1, true);
      break;
    case CountClass::Labeled:
      check_vars(d, v);
      counts_ = chain(d, v, 2, true);
      break;
    case CountClass::MinDepthShapes:
      throw UsageError("CountTable: min-depth counts are not tabulated per budget");
  }
}

std::vector<BigCount> structures_by_leaf_count(int d, int v) {
  check_vars(d, v);
  // poly_k[L] for budget k with v - d + k variables.
  std::vector<BigCount> poly{0, 1};
  for (int k = 1; k <= d; ++k) {
    std::vector<BigCount> next(2 * poly.size() - 1);
    for (std::size_t a = 1; a < poly.size(); ++a) {
      for (std::size_t b = 1; b < poly.size(); ++b) next[a + b] += poly[a] * poly[b];
    }
    for (auto& c : next) c *= static_cast<unsigned long>(v - d + k);
    next[1] += 1;
    poly = std::move(next);
  }
  return poly;
}

BigCount uniform_below(const BigCount& bound, RandomStream& rng) {
  if (bound < 1) throw UsageError("uniform_below: bound must be >= 1");
  if (bound == 1) return 0;
  const BigCount top = bound - 1;
  const std::size_t bits = mpz_sizeinbase(top.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  const std::size_t spare = words * 64 - bits;
  std::vector<std::uint64_t> block(words);
  BigCount draw;
  for (;;) {
    for (auto& w : block) w = rng.next_word();
    block.back() >>= spare;  // most significant word, see import order below
    mpz_import(draw.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, block.data());
    if (draw < bound) return draw;
  }
}

}  // namespace dtq
