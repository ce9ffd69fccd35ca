#include <benchmark/benchmark.h>

#include "anonplan/elimination.hpp"
#include "anonplan/mixed_factor.hpp"

using namespace anonplan;

namespace {

// CAF over #{0..n-1} plus a proper variable overlapping the counter.
MixedModeFactor window(VarId first, VarId size) {
  std::vector<VarId> members;
  for (VarId i = 0; i < size; ++i) members.push_back(first + i);
  return MixedModeFactor::tabulate({{first, 2}}, {CountScope(members)},
                                   [](std::span<const int> p, std::span<const int> k) { return p[0] - 0.5 * k[0]; });
}

void BM_Augment(benchmark::State& state) {
  const auto size = static_cast<VarId>(state.range(0));
  const auto g = window(0, size);
  const auto h = window(size / 2, size);
  for (auto _ : state) benchmark::DoNotOptimize(augment(g, h));
}
BENCHMARK(BM_Augment)->Arg(4)->Arg(8)->Arg(16);

void BM_ReduceShared(benchmark::State& state) {
  const auto size = static_cast<VarId>(state.range(0));
  const auto f = augment(window(0, size), window(size / 2, size));
  const VarId shared = size - 1;
  for (auto _ : state) benchmark::DoNotOptimize(reduce_max(f, shared));
}
BENCHMARK(BM_ReduceShared)->Arg(4)->Arg(8)->Arg(16);

void BM_EliminateChain(benchmark::State& state) {
  std::vector<MixedModeFactor> fs;
  const auto windows = static_cast<VarId>(state.range(0));
  for (VarId w = 0; w < windows; ++w) fs.push_back(window(3 * w, 5));
  const FactorSet set(fs);
  const auto vars = set.variables();
  const auto order = greedy_order(set, vars);
  for (auto _ : state) benchmark::DoNotOptimize(eliminate_max(set, order));
}
BENCHMARK(BM_EliminateChain)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
