#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtq/report.hpp"
#include "dtq/sampler.hpp"

namespace dtq {

enum class Experiment { Lemma3, Lemma4, Lemma5, Theorem1, ModelCompare };

/// "lemma3", "lemma4", "lemma5", "theorem1", "model-compare".
std::string_view to_string(Experiment experiment);
std::optional<Experiment> parse_experiment(std::string_view name);

struct ExperimentConfig {
  Experiment experiment = Experiment::Theorem1;
  Model model = Model::FullUniform;
  int d = 6;
  int n = 8;
  std::int64_t samples = 100;
  std::uint64_t seed = 1;
  double epsilon = 0.5;
  std::optional<int> h;
  /// Worker threads. Never affects the report contents.
  int workers = 1;

  // Switchover thresholds, echoed in every report.
  int exhaustive_leaf_cap = 16;      ///< lemma3: exhaust all 2^L assignments up to this L
  int exact_depth_cap = 14;          ///< lemma5: exact shape-count tables up to this d
  int assignments_per_structure = 512;  ///< lemma3: random assignments above the cap
  int flips_per_tree = 32;           ///< lemma4: flip every leaf up to this many, else a random subset

  /// Throws UsageError on n < d, samples < 1, epsilon outside (0, 1), ...
  void validate() const;
};

Report run_lemma3(const ExperimentConfig& config);
Report run_lemma4(const ExperimentConfig& config);
Report run_lemma5(const ExperimentConfig& config);
Report run_theorem1(const ExperimentConfig& config);
Report run_model_compare(const ExperimentConfig& config);
/// Dispatches on config.experiment.
Report run_experiment(const ExperimentConfig& config);

/// Aggregates as a pure function of meta and records. The run_* functions
/// fill Report::aggregates with exactly this.
NamedCells recompute_aggregates(const Report& report);

/// Descriptions of every aggregate whose stored value differs from its
/// recomputation; empty when the report is self-consistent.
std::vector<std::string> verify_report(const Report& report);

/// Runs fn(0..count-1) on `workers` threads. The first exception is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Canonical text of the tree with every leaf relabeled 0; identifies its Structure.
std::string structure_key(const DecisionTree& tree);

}  // namespace dtq
