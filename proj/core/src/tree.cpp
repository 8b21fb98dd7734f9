#include "dtq/tree.hpp"

#include "dtq/errors.hpp"

namespace dtq {

Shape Shape::node(Shape left, Shape right) {
  auto n = std::make_shared<Node>();
  n->left = std::move(left.node_);
  n->right = std::move(right.node_);
  return Shape(std::move(n));
}

int Shape::depth() const {
  if (is_leaf()) return 0;
  return 1 + std::max(left().depth(), right().depth());
}

std::size_t Shape::leaf_count() const {
  if (is_leaf()) return 1;
  return left().leaf_count() + right().leaf_count();
}

bool operator==(const Shape& a, const Shape& b) {
  if (a.node_ == b.node_) return true;
  if (a.is_leaf() || b.is_leaf()) return a.is_leaf() && b.is_leaf();
  return a.left() == b.left() && a.right() == b.right();
}

Dyadic LeafProfile::kraft_sum() const {
  Dyadic sum;
  for (int d : depths) sum += Dyadic::pow2(-d);
  return sum;
}

Evaluation evaluate(const DecisionTree& tree, std::span<const std::uint8_t> x) {
  const DecisionTree::Node* node = tree.node();
  int steps = 0;
  while (!node->is_leaf()) {
    if (node->var >= x.size()) {
      throw UsageError("evaluate: tree queries variable " + std::to_string(node->var) +
                       " but input has length " + std::to_string(x.size()));
    }
    node = node->child(x[node->var] != 0);
    ++steps;
  }
  return {node->label, steps};
}

namespace {

DecisionTree assemble_rec(const Structure& s, const LeafAssignment& leaves, std::size_t& next) {
  if (s.is_leaf()) {
    if (next >= leaves.size()) throw UsageError("assemble: too few leaf bits");
    return DecisionTree::leaf(leaves.bits[next++]);
  }
  auto on0 = assemble_rec(s.on0(), leaves, next);
  auto on1 = assemble_rec(s.on1(), leaves, next);
  return DecisionTree::query(s.var(), std::move(on0), std::move(on1));
}

DecisionTree flip_rec(const DecisionTree& t, std::size_t target, std::size_t& seen) {
  if (t.is_leaf()) {
    return seen++ == target ? DecisionTree::leaf(!t.label()) : t;
  }
  const std::size_t before = seen;
  auto on0 = flip_rec(t.on0(), target, seen);
  if (seen > target && before <= target) {
    // The flipped leaf lies in on0; on1 is shared untouched.
    return DecisionTree::query(t.var(), std::move(on0), t.on1());
  }
  auto on1 = flip_rec(t.on1(), target, seen);
  if (seen > target && before <= target) {
    return DecisionTree::query(t.var(), t.on0(), std::move(on1));
  }
  return t;
}

}  // namespace

DecisionTree assemble(const Structure& structure, const LeafAssignment& leaves) {
  std::size_t next = 0;
  auto tree = assemble_rec(structure, leaves, next);
  if (next != leaves.size()) {
    throw UsageError("assemble: " + std::to_string(leaves.size()) + " leaf bits for " +
                     std::to_string(next) + " leaves");
  }
  return tree;
}

Structure structure_of(const DecisionTree& tree) {
  if (tree.is_leaf()) return Structure::leaf();
  return Structure::query(tree.var(), structure_of(tree.on0()), structure_of(tree.on1()));
}

LeafAssignment assignment_of(const DecisionTree& tree) {
  LeafAssignment out;
  for_each_leaf(tree, [&](const DecisionTree::Node& leaf, int) { out.bits.push_back(leaf.label); });
  return out;
}

std::pair<Structure, LeafAssignment> disassemble(const DecisionTree& tree) {
  return {structure_of(tree), assignment_of(tree)};
}

DecisionTree with_leaf_flipped(const DecisionTree& tree, std::size_t index) {
  std::size_t seen = 0;
  auto out = flip_rec(tree, index, seen);
  if (index >= seen) {
    throw UsageError("with_leaf_flipped: leaf " + std::to_string(index) + " of " +
                     std::to_string(seen));
  }
  return out;
}

Shape shape_of(const Structure& structure) {
  if (structure.is_leaf()) return Shape::leaf();
  return Shape::node(shape_of(structure.on0()), shape_of(structure.on1()));
}

namespace trees {

DecisionTree dictator(Var var) {
  return DecisionTree::query(var, DecisionTree::leaf(false), DecisionTree::leaf(true));
}

DecisionTree and2(Var a, Var b) {
  return DecisionTree::query(a, DecisionTree::leaf(false), dictator(b));
}

Structure complete_structure(int d) {
  if (d < 0) throw UsageError("complete_structure: negative depth");
  auto rec = [](auto&& self, int depth, int target) -> Structure {
    if (depth == target) return Structure::leaf();
    return Structure::query(static_cast<Var>(depth), self(self, depth + 1, target),
                            self(self, depth + 1, target));
  };
  return rec(rec, 0, d);
}

DecisionTree tightness_family(int n, bool alpha) {
  if (n < 2) throw UsageError("tightness_family: need n >= 2");
  // x_1 AND ... AND x_{n-1}, built bottom-up.
  DecisionTree chain = DecisionTree::leaf(true);
  for (int v = n - 1; v >= 1; --v) {
    chain = DecisionTree::query(static_cast<Var>(v), DecisionTree::leaf(false), chain);
  }
  return DecisionTree::query(0, chain, DecisionTree::leaf(alpha));
}

std::size_t tightness_leaf_index(int n) {
  // The chain on x_1..x_{n-1} contributes n leaves before the depth-1 leaf.
  return static_cast<std::size_t>(n);
}

}  // namespace trees

}  // namespace dtq
