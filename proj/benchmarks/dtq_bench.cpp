#include <vector>

#include <benchmark/benchmark.h>

#include "dtq/counting.hpp"
#include "dtq/random.hpp"
#include "dtq/sampler.hpp"
#include "dtq/sensitivity.hpp"

namespace {

void BM_CountLabeled(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dtq::count_labeled(d, 2 * d));
}
BENCHMARK(BM_CountLabeled)->Arg(4)->Arg(8)->Arg(12)->Arg(16);

void BM_Sample(benchmark::State& state) {
  const auto model = dtq::kAllModels[state.range(0)];
  const int d = static_cast<int>(state.range(1));
  const dtq::TreeSampler sampler(model, d, d + 4);
  dtq::RandomStream root(7);
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto rng = root.substream(i++);
    benchmark::DoNotOptimize(sampler(rng));
  }
  state.SetLabel(std::string(dtq::to_string(model)));
}
BENCHMARK(BM_Sample)->ArgsProduct({{0, 1, 2, 3}, {6, 12}});

std::vector<dtq::DecisionTree> pool(int d, int n) {
  dtq::RandomStream root(11);
  std::vector<dtq::DecisionTree> trees;
  for (std::uint64_t i = 0; i < 64; ++i) {
    auto rng = root.substream(i);
    trees.push_back(dtq::sample(dtq::Model::FullUniform, d, n, rng));
  }
  return trees;
}

void BM_SensitivityStructural(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto trees = pool(n, n);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(dtq::avg_sensitivity_structural(trees[i++ % trees.size()]));
}
BENCHMARK(BM_SensitivityStructural)->Arg(8)->Arg(12)->Arg(16);

void BM_SensitivityBruteForce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto trees = pool(n, n);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto tt = dtq::truth_table(trees[i++ % trees.size()], n);
    benchmark::DoNotOptimize(dtq::avg_sensitivity_bruteforce(tt));
  }
}
BENCHMARK(BM_SensitivityBruteForce)->Arg(8)->Arg(12)->Arg(16);

}  // namespace
BENCHMARK_MAIN();
