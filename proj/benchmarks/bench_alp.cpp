#include <benchmark/benchmark.h>

#include "anonplan/alp.hpp"
#include "anonplan/epidemics.hpp"
#include "anonplan/error.hpp"

using namespace anonplan;

namespace {

EpidemicInstance instance(std::size_t n, int k_max) {
  for (std::uint64_t seed = 1;; seed += 1000) {
    try {
      auto inst = random_graph(n, k_max, seed);
      select_controlled(inst, n / 2);
      return inst;
    } catch (const Error&) {
    }
  }
}

void constraint_generation(benchmark::State& state, AlpMethod method) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)), 6);
  const auto m = build_sis_model(inst);
  const auto basis = indicator_basis(m);
  std::size_t rows = 0;
  for (auto _ : state) {
    const auto p = build_alp(m, basis, method);
    rows = p.lp.num_constraints();
  }
  state.counters["constraints"] = static_cast<double>(rows);
}

void BM_GenerateFlat(benchmark::State& state) { constraint_generation(state, AlpMethod::flat); }
void BM_GenerateRR(benchmark::State& state) { constraint_generation(state, AlpMethod::rr); }
BENCHMARK(BM_GenerateFlat)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateRR)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SolveRR(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)), 6);
  const auto m = build_sis_model(inst);
  const auto basis = indicator_basis(m);
  const auto p = build_alp(m, basis, AlpMethod::rr);
  for (auto _ : state) benchmark::DoNotOptimize(solve_alp(p, ReferenceSolver()));
}
BENCHMARK(BM_SolveRR)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
