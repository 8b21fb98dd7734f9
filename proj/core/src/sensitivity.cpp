#include "dtq/sensitivity.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "dtq/errors.hpp"

namespace dtq {

TruthTable::TruthTable(int n) : n_(n) {
  if (n < 0) throw UsageError("truth table: negative variable count");
  if (n > kMaxTruthTableVars) {
    throw CapacityError("truth table: n=" + std::to_string(n) + " exceeds cap " +
                        std::to_string(kMaxTruthTableVars));
  }
  words_.assign(std::max<std::uint64_t>(1, size() >> 6), 0);
}

void TruthTable::set(std::uint64_t x, bool value) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << (x & 63);
  if (value) {
    words_[x >> 6] |= bit;
  } else {
    words_[x >> 6] &= ~bit;
  }
}

void PathContext::fix(Var var, bool bit) {
  if (var >= bits_.size()) bits_.resize(var + 1, -1);
  if (bits_[var] >= 0) throw UsageError("PathContext: variable " + std::to_string(var) + " fixed twice");
  bits_[var] = bit ? 1 : 0;
  ++fixed_;
}

void PathContext::release(Var var) {
  if (var < bits_.size() && bits_[var] >= 0) {
    bits_[var] = -1;
    --fixed_;
  }
}

TruthTable truth_table(const DecisionTree& tree, int n) {
  TruthTable tt(n);
  if (max_var(tree) >= n) {
    throw UsageError("truth table: tree queries a variable >= n=" + std::to_string(n));
  }
  for (std::uint64_t x = 0; x < tt.size(); ++x) {
    const DecisionTree::Node* node = tree.node();
    while (!node->is_leaf()) node = node->child((x >> node->var) & 1U);
    if (node->label) tt.set(x, true);
  }
  return tt;
}

Dyadic avg_sensitivity_bruteforce(const TruthTable& tt) {
  static constexpr std::uint64_t kLowHalf[6] = {
      0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL,
      0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL, 0x00000000ffffffffULL,
  };
  const int n = tt.vars();
  const auto& words = tt.words();
  const std::uint64_t valid = n >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << tt.size()) - 1;

  // Each disagreeing Hamming edge {x, x^i} is counted once.
  std::uint64_t edges = 0;
  for (int i = 0; i < std::min(n, 6); ++i) {
    const int shift = 1 << i;
    for (std::uint64_t w : words) {
      edges += std::popcount((w ^ (w >> shift)) & kLowHalf[i] & valid);
    }
  }
  for (int i = 6; i < n; ++i) {
    const std::size_t stride = std::size_t{1} << (i - 6);
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (w & stride) continue;
      edges += std::popcount(words[w] ^ words[w + stride]);
    }
  }
  return Dyadic(mpz_class(static_cast<unsigned long>(edges)) * 2, static_cast<std::uint64_t>(n));
}

namespace {

using Node = DecisionTree::Node;

// Simultaneous traversal of two trees under a shared partial assignment.
// A disagreement reached after branching on `level` free variables has
// probability 2^-level; hist_[level] counts them.
class DisagreementKernel {
 public:
  explicit DisagreementKernel(std::size_t var_bound) : ctx_(var_bound, -1) {}

  std::vector<std::int8_t>& ctx() { return ctx_; }

  void run(const Node* a, const Node* b, std::size_t level) {
    while (!a->is_leaf() && ctx_[a->var] >= 0) a = a->child(ctx_[a->var]);
    while (!b->is_leaf() && ctx_[b->var] >= 0) b = b->child(ctx_[b->var]);
    if (a == b) return;
    if (a->is_leaf() && b->is_leaf()) {
      if (a->label != b->label) {
        if (level >= hist_.size()) hist_.resize(level + 1, 0);
        ++hist_[level];
      }
      return;
    }
    const Var v = a->is_leaf() ? b->var : a->var;
    ctx_[v] = 0;
    run(a, b, level + 1);
    ctx_[v] = 1;
    run(a, b, level + 1);
    ctx_[v] = -1;
  }

  Dyadic total() const {
    if (hist_.empty()) return {};
    const std::size_t top = hist_.size() - 1;
    mpz_class numerator;
    for (std::size_t j = 0; j <= top; ++j) {
      if (hist_[j] == 0) continue;
      mpz_class term(static_cast<unsigned long>(hist_[j]));
      mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), top - j);
      numerator += term;
    }
    return {numerator, top};
  }

 private:
  std::vector<std::int8_t> ctx_;
  std::vector<std::uint64_t> hist_;
};

std::size_t var_bound(const DecisionTree& t) { return static_cast<std::size_t>(max_var(t) + 1); }

void walk(const Node* u, std::size_t depth, DisagreementKernel& kernel) {
  if (u->is_leaf()) return;
  auto& ctx = kernel.ctx();
  kernel.run(u->child(false), u->child(true), depth);
  ctx[u->var] = 0;
  walk(u->child(false), depth + 1, kernel);
  ctx[u->var] = 1;
  walk(u->child(true), depth + 1, kernel);
  ctx[u->var] = -1;
}

}  // namespace

Dyadic disagreement_probability(const DecisionTree& a, const DecisionTree& b, const PathContext& ctx) {
  std::size_t bound = std::max(var_bound(a), var_bound(b));
  DisagreementKernel kernel(bound);
  for (std::size_t v = 0; v < bound; ++v) kernel.ctx()[v] = static_cast<std::int8_t>(ctx.value(static_cast<Var>(v)));
  kernel.run(a.node(), b.node(), 0);
  return kernel.total();
}

Dyadic avg_sensitivity_structural(const DecisionTree& tree) {
  for (const auto& v : validate(tree, -1, std::numeric_limits<int>::max())) {
    if (v.kind == Violation::Kind::RepeatedVariable) {
      throw UsageError("structural sensitivity needs a non-redundant tree: " + v.message);
    }
  }
  DisagreementKernel kernel(var_bound(tree));
  walk(tree.node(), 0, kernel);
  return kernel.total();
}

}  // namespace dtq
