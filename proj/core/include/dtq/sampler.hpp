#pragma once

#include <optional>
#include <string_view>

#include "dtq/counting.hpp"
#include "dtq/random.hpp"
#include "dtq/tree.hpp"

namespace dtq {

/// Random decision-tree distributions over depth <= d trees on n variables.
enum class Model {
  /// Uniform shape (counted by N), then every internal vertex gets a
  /// variable uniformly among those unused on its root path, then uniform
  /// leaf bits. Not uniform over decision trees.
  ShapeUniform,
  /// Uniform over Structures (counted by C), then uniform leaf bits.
  StructureTwoStage,
  /// Uniform over fully labeled non-redundant trees (counted by F).
  FullUniform,
  /// Complete depth-d shape, uniform non-redundant variables, uniform leaf bits.
  Complete,
};

inline constexpr Model kAllModels[] = {Model::ShapeUniform, Model::StructureTwoStage,
                                       Model::FullUniform, Model::Complete};

/// "shape-uniform", "structure-two-stage", "full-uniform", "complete".
std::string_view to_string(Model model);
/// Accepts the names above case-insensitively, with '-' or '_'.
std::optional<Model> parse_model(std::string_view name);

/// Exact sampler for one (model, d, n). Construction builds the count table
/// once; sampling is const and thread-safe given distinct RandomStreams.
class TreeSampler {
 public:
  TreeSampler(Model model, int d, int n);

  DecisionTree operator()(RandomStream& rng) const;

  Model model() const noexcept { return model_; }
  int depth() const noexcept { return d_; }
  int vars() const noexcept { return n_; }

 private:
  Model model_;
  int d_;
  int n_;
  std::optional<CountTable> table_;
};

/// One-shot convenience wrapper around TreeSampler.
DecisionTree sample(Model model, int d, int n, RandomStream& rng);

}  // namespace dtq
