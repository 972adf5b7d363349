#include <benchmark/benchmark.h>

#include <random>

#include "fplab/elliptic.hpp"
#include "fplab/evolution.hpp"

using namespace fplab;

namespace {

Field random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  Field v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = -1.0 + 2.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
  return v;
}

ModelParams desk_params() {
  ModelParams mp;
  mp.m = 2.0;
  mp.p = 2.0;
  mp.s = 0.5;
  mp.q = 1.0;
  return mp;
}

}  // namespace

static void BM_OpApply(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ModelParams mp = desk_params();
  const Grid1D grid = build_grid(0.0, 1.0, n, mp);
  const KernelMatrix K = build_kernel(grid);
  const Field v = random_field(n, 42);
  for (auto _ : state) benchmark::DoNotOptimize(op_apply(v, K, mp.p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OpApply)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

static void BM_SeminormPow(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ModelParams mp = desk_params();
  const Grid1D grid = build_grid(0.0, 1.0, n, mp);
  const KernelMatrix K = build_kernel(grid);
  const Field v = random_field(n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(seminorm_pow(v, K, mp.p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SeminormPow)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

static void BM_ResolventCold(benchmark::State& state) {
  const std::size_t n = 64;
  const ModelParams mp = desk_params();
  const Grid1D grid = build_grid(0.0, 1.0, n, mp);
  const KernelMatrix K = build_kernel(grid);
  const Field f = random_field(n, 3);
  SolverConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_resolvent(0.1, f, mp, K, cfg));
}
BENCHMARK(BM_ResolventCold);

static void BM_EvolveStepWarm(benchmark::State& state) {
  const std::size_t n = 64;
  ModelParams mp = desk_params();
  mp.p = 3.0;
  const Grid1D grid = build_grid(0.0, 1.0, n, mp);
  const KernelMatrix K = build_kernel(grid);
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  cfg.source = SourceSpec::power(mp.q);
  Field v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 0.25 * grid.dist[i];
  for (auto _ : state) benchmark::DoNotOptimize(step(v, 0.0, mp, grid, K, cfg));
}
BENCHMARK(BM_EvolveStepWarm);

BENCHMARK_MAIN();
