#include "dtq/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "dtq/errors.hpp"

namespace dtq {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::ShapeUniform: return "shape-uniform";
    case Model::StructureTwoStage: return "structure-two-stage";
    case Model::FullUniform: return "full-uniform";
    case Model::Complete: return "complete";
  }
  return "?";
}

std::optional<Model> parse_model(std::string_view name) {
  std::string key;
  for (char c : name) key += c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Model m : kAllModels) {
    if (key == to_string(m)) return m;
  }
  return std::nullopt;
}

namespace {

// Variables still unused on the current root path. pick() removes one
// uniformly at random; restore() undoes the most recent pick.
class VarPool {
 public:
  explicit VarPool(int n) {
    for (int i = 0; i < n; ++i) vars_.push_back(static_cast<Var>(i));
  }
  std::size_t size() const { return vars_.size(); }

  std::pair<Var, std::size_t> pick(RandomStream& rng) {
    const std::size_t r = rng.uniform_below(vars_.size());
    const Var v = vars_[r];
    std::swap(vars_[r], vars_.back());
    vars_.pop_back();
    return {v, r};
  }
  void restore(Var v, std::size_t slot) {
    vars_.push_back(v);
    std::swap(vars_[slot], vars_.back());
  }

 private:
  std::vector<Var> vars_;
};

// Recursive method: at budget k, leaf with probability leaf_weight / table(k).
DecisionTree grow(const CountTable& table, unsigned long leaf_weight, bool label_leaves_now, int budget,
                  VarPool& pool, RandomStream& rng) {
  const bool leaf = uniform_below(table.at(budget), rng) < leaf_weight;
  if (leaf) return DecisionTree::leaf(label_leaves_now ? rng.next_bit() : false);
  const auto [v, slot] = pool.pick(rng);
  auto on0 = grow(table, leaf_weight, label_leaves_now, budget - 1, pool, rng);
  auto on1 = grow(table, leaf_weight, label_leaves_now, budget - 1, pool, rng);
  pool.restore(v, slot);
  return DecisionTree::query(v, std::move(on0), std::move(on1));
}

Shape grow_shape(const CountTable& table, int budget, RandomStream& rng) {
  if (uniform_below(table.at(budget), rng) == 0) return Shape::leaf();
  auto left = grow_shape(table, budget - 1, rng);
  auto right = grow_shape(table, budget - 1, rng);
  return Shape::node(std::move(left), std::move(right));
}

Shape complete_shape(int d) {
  if (d == 0) return Shape::leaf();
  const Shape sub = complete_shape(d - 1);
  return Shape::node(sub, sub);
}

// Top-down variable labeling, then leaf bits, in one depth-first pass.
DecisionTree label(const Shape& shape, VarPool& pool, RandomStream& rng) {
  if (shape.is_leaf()) return DecisionTree::leaf(rng.next_bit());
  const auto [v, slot] = pool.pick(rng);
  auto on0 = label(shape.left(), pool, rng);
  auto on1 = label(shape.right(), pool, rng);
  pool.restore(v, slot);
  return DecisionTree::query(v, std::move(on0), std::move(on1));
}

DecisionTree relabel_leaves(const DecisionTree& t, RandomStream& rng) {
  if (t.is_leaf()) return DecisionTree::leaf(rng.next_bit());
  auto on0 = relabel_leaves(t.on0(), rng);
  auto on1 = relabel_leaves(t.on1(), rng);
  return DecisionTree::query(t.var(), std::move(on0), std::move(on1));
}

}  // namespace

TreeSampler::TreeSampler(Model model, int d, int n) : model_(model), d_(d), n_(n) {
  if (d < 0) throw UsageError("sampler: depth must be nonnegative");
  if (n < d) {
    throw UsageError("sampler: need n >= d, got n=" + std::to_string(n) + ", d=" + std::to_string(d));
  }
  switch (model) {
    case Model::ShapeUniform: table_.emplace(CountClass::Shapes, d, n); break;
    case Model::StructureTwoStage: table_.emplace(CountClass::Structures, d, n); break;
    case Model::FullUniform: table_.emplace(CountClass::Labeled, d, n); break;
    case Model::Complete: break;
  }
}

DecisionTree TreeSampler::operator()(RandomStream& rng) const {
  VarPool pool(n_);
  switch (model_) {
    case Model::ShapeUniform: {
      const Shape shape = grow_shape(*table_, d_, rng);
      return label(shape, pool, rng);
    }
    case Model::StructureTwoStage: {
      // Stage one: uniform structure. Stage two: independent uniform leaf bits.
      const DecisionTree structure = grow(*table_, 1, false, d_, pool, rng);
      return relabel_leaves(structure, rng);
    }
    case Model::FullUniform:
      return grow(*table_, 2, true, d_, pool, rng);
    case Model::Complete:
      return label(complete_shape(d_), pool, rng);
  }
  throw UsageError("sampler: unknown model");
}

DecisionTree sample(Model model, int d, int n, RandomStream& rng) {
  return TreeSampler(model, d, n)(rng);
}

}  // namespace dtq
