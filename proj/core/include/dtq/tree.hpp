#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtq/dyadic.hpp"

namespace dtq {

/// 0-based variable index; x_1..x_n of the usual notation are 0..n-1.
using Var = std::uint32_t;

/// Label carried by the leaves of a Structure: none.
struct OpenLeaf {
  friend bool operator==(OpenLeaf, OpenLeaf) = default;
};

/// Immutable full binary tree whose internal nodes query a variable and whose
/// leaves carry a `Label`. Copies share nodes; equality is structural.
template <class Label>
class QueryTree {
  struct NullTag {};
  explicit QueryTree(NullTag) noexcept {}

 public:
  struct Node;

  QueryTree() : QueryTree(leaf()) {}

  static QueryTree leaf(Label label = Label{}) {
    auto node = std::make_shared<Node>();
    node->label = std::move(label);
    return QueryTree(std::move(node));
  }

  static QueryTree query(Var var, QueryTree on0, QueryTree on1) {
    auto node = std::make_shared<Node>();
    node->var = var;
    node->on0 = std::move(on0);
    node->on1 = std::move(on1);
    return QueryTree(std::move(node));
  }

  bool is_leaf() const noexcept { return node_->is_leaf(); }
  Var var() const noexcept { return node_->var; }
  const Label& label() const noexcept { return node_->label; }
  const QueryTree& on0() const noexcept { return node_->on0; }
  const QueryTree& on1() const noexcept { return node_->on1; }
  const QueryTree& child(bool bit) const noexcept { return bit ? on1() : on0(); }

  /// Raw view for hot traversal loops; valid while this tree is alive.
  const Node* node() const noexcept { return node_.get(); }

  friend bool operator==(const QueryTree& a, const QueryTree& b) {
    if (a.node_ == b.node_) return true;
    if (a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) return a.label() == b.label();
    return a.var() == b.var() && a.on0() == b.on0() && a.on1() == b.on1();
  }

 private:
  explicit QueryTree(std::shared_ptr<const Node> node) noexcept : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

template <class Label>
struct QueryTree<Label>::Node {
  Var var = 0;
  Label label{};
  QueryTree on0{NullTag{}};
  QueryTree on1{NullTag{}};

  bool is_leaf() const noexcept { return on0.node_ == nullptr; }
  const Node* child(bool bit) const noexcept { return (bit ? on1 : on0).node_.get(); }
};

/// Internal vertices labeled with variables, leaves unlabeled.
using Structure = QueryTree<OpenLeaf>;
/// Fully labeled boolean decision tree.
using DecisionTree = QueryTree<bool>;

/// Unlabeled full binary tree.
class Shape {
 public:
  Shape() : node_(std::make_shared<Node>()) {}
  static Shape leaf() { return {}; }
  static Shape node(Shape left, Shape right);

  bool is_leaf() const noexcept { return !node_->left; }
  Shape left() const { return Shape(node_->left); }
  Shape right() const { return Shape(node_->right); }

  int depth() const;
  std::size_t leaf_count() const;

  friend bool operator==(const Shape& a, const Shape& b);

 private:
  struct Node {
    std::shared_ptr<const Node> left, right;
  };
  explicit Shape(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Leaf bits in depth-first order, on0 subtree before on1 subtree.
struct LeafAssignment {
  std::vector<bool> bits;

  std::size_t size() const noexcept { return bits.size(); }
  friend bool operator==(const LeafAssignment&, const LeafAssignment&) = default;
};

/// Leaf depths in depth-first order.
struct LeafProfile {
  std::vector<int> depths;

  std::size_t size() const noexcept { return depths.size(); }
  int min_depth() const { return *std::min_element(depths.begin(), depths.end()); }
  int max_depth() const { return *std::max_element(depths.begin(), depths.end()); }
  /// Sum of 2^-depth; exactly 1 for a full binary tree.
  Dyadic kraft_sum() const;
};

struct Violation {
  enum class Kind { RepeatedVariable, VariableOutOfRange, DepthExceeded };
  Kind kind;
  Var var = 0;
  int depth = 0;
  std::string message;
};

struct Evaluation {
  bool value = false;
  int path_length = 0;
};

namespace detail {

template <class Label, class Fn>
void for_each_leaf(const typename QueryTree<Label>::Node* node, int depth, Fn& fn) {
  if (node->is_leaf()) {
    fn(*node, depth);
    return;
  }
  for_each_leaf<Label>(node->child(false), depth + 1, fn);
  for_each_leaf<Label>(node->child(true), depth + 1, fn);
}

template <class Label>
void validate_rec(const typename QueryTree<Label>::Node* node, int depth, int n, int d,
                  std::vector<char>& on_path, std::vector<Violation>& out) {
  if (depth > d && node->is_leaf()) {
    out.push_back({Violation::Kind::DepthExceeded, 0, depth,
                   "depth " + std::to_string(depth) + " exceeds bound " + std::to_string(d)});
  }
  if (node->is_leaf()) return;
  const Var v = node->var;
  bool pushed = false;
  if (n >= 0 && v >= static_cast<Var>(n)) {
    out.push_back({Violation::Kind::VariableOutOfRange, v, depth,
                   "variable " + std::to_string(v) + " out of range (n=" + std::to_string(n) + ")"});
  }
  if (v >= on_path.size()) on_path.resize(v + 1, 0);
  if (on_path[v]) {
    out.push_back({Violation::Kind::RepeatedVariable, v, depth,
                   "variable " + std::to_string(v) + " repeated on path"});
  } else {
    on_path[v] = 1;
    pushed = true;
  }
  validate_rec<Label>(node->child(false), depth + 1, n, d, on_path, out);
  validate_rec<Label>(node->child(true), depth + 1, n, d, on_path, out);
  if (pushed) on_path[v] = 0;
}

}  // namespace detail

/// Calls fn(node, depth) for every leaf in depth-first on0-before-on1 order.
template <class Label, class Fn>
void for_each_leaf(const QueryTree<Label>& tree, Fn&& fn) {
  detail::for_each_leaf<Label>(tree.node(), 0, fn);
}

template <class Label>
LeafProfile leaf_profile(const QueryTree<Label>& tree) {
  LeafProfile profile;
  for_each_leaf(tree, [&](const auto&, int depth) { profile.depths.push_back(depth); });
  return profile;
}

template <class Label>
std::size_t leaf_count(const QueryTree<Label>& tree) {
  std::size_t count = 0;
  for_each_leaf(tree, [&](const auto&, int) { ++count; });
  return count;
}

template <class Label>
int depth(const QueryTree<Label>& tree) {
  int deepest = 0;
  for_each_leaf(tree, [&](const auto&, int d) { deepest = std::max(deepest, d); });
  return deepest;
}

/// Largest variable index queried anywhere, or -1 for a single leaf.
template <class Label>
long max_var(const QueryTree<Label>& tree) {
  long best = -1;
  auto rec = [&](auto&& self, const typename QueryTree<Label>::Node* node) -> void {
    if (node->is_leaf()) return;
    best = std::max(best, static_cast<long>(node->var));
    self(self, node->child(false));
    self(self, node->child(true));
  };
  rec(rec, tree.node());
  return best;
}

/// Every violation of non-redundancy, variable range (n) and depth bound (d).
/// A depth violation is reported once per offending leaf.
template <class Label>
std::vector<Violation> validate(const QueryTree<Label>& tree, int n, int d) {
  std::vector<Violation> out;
  std::vector<char> on_path;
  detail::validate_rec<Label>(tree.node(), 0, n, d, on_path, out);
  return out;
}

template <class Label>
bool is_valid(const QueryTree<Label>& tree, int n, int d) {
  return validate(tree, n, d).empty();
}

/// Follows x from the root. Throws UsageError if a queried variable is
/// outside x.
Evaluation evaluate(const DecisionTree& tree, std::span<const std::uint8_t> x);

/// Attaches leaf labels in depth-first order. Throws UsageError on a length mismatch.
DecisionTree assemble(const Structure& structure, const LeafAssignment& leaves);
Structure structure_of(const DecisionTree& tree);
LeafAssignment assignment_of(const DecisionTree& tree);
std::pair<Structure, LeafAssignment> disassemble(const DecisionTree& tree);

/// Copy of `tree` with leaf `index` (depth-first order) negated; untouched
/// subtrees are shared.
DecisionTree with_leaf_flipped(const DecisionTree& tree, std::size_t index);

/// Forgets the variables; `shape_of(s).depth() == depth(s)`.
Shape shape_of(const Structure& structure);

namespace trees {

/// x_var as a one-query tree.
DecisionTree dictator(Var var);
/// x_a AND x_b, querying x_a first.
DecisionTree and2(Var a, Var b);
/// Complete depth-d structure; every vertex at depth k queries variable k.
Structure complete_structure(int d);
/// a*x_0 + (1 - x_0) x_1 x_2 ... x_{n-1}: a chain on the x_0 = 0 side and a
/// single depth-1 leaf carrying `alpha` on the x_0 = 1 side.
DecisionTree tightness_family(int n, bool alpha);
/// Depth-first index of the depth-1 leaf of tightness_family(n, .).
std::size_t tightness_leaf_index(int n);

}  // namespace trees

}  // namespace dtq
