#include <benchmark/benchmark.h>

#include "marginsel/binomial.hpp"
#include "marginsel/complexity.hpp"
#include "marginsel/distributions.hpp"
#include "marginsel/erm.hpp"
#include "marginsel/harness.hpp"

using namespace marginsel;

static void BM_DrawSample(benchmark::State& state) {
  const auto inst = chain_instance(2.0, 4, 512);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(draw_sample(inst.dist, n, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DrawSample)->Arg(512)->Arg(8192);

static void BM_Erm(benchmark::State& state) {
  const auto inst = chain_instance(2.0, 4, 512);
  const auto family = odd_chain(inst, 4);
  const auto sample = draw_sample(inst.dist, 512, 1);
  for (auto _ : state) benchmark::DoNotOptimize(erm_index(family[3], sample));
}
BENCHMARK(BM_Erm);

static void BM_EmpiricalFixedPoint(benchmark::State& state) {
  const auto inst = chain_instance(2.0, 4, 512);
  const auto family = odd_chain(inst, 4);
  const auto sample = draw_sample(inst.dist, 512, 1);
  const auto eps = rademacher_draw(512, 2);
  ComplexityConfig cfg;
  cfg.t = auto_confidence(4, 512);
  for (auto _ : state) benchmark::DoNotOptimize(fixed_point_empirical(family[3], sample, cfg, eps));
}
BENCHMARK(BM_EmpiricalFixedPoint);

static void BM_IdealFixedPoint(benchmark::State& state) {
  const auto inst = chain_instance(2.0, 4, 512);
  const auto family = odd_chain(inst, 4);
  ComplexityConfig cfg;
  cfg.t = auto_confidence(4, 512);
  cfg.mc_reps = 200;
  for (auto _ : state) benchmark::DoNotOptimize(fixed_point_ideal(family[3], inst.dist, 512, cfg));
}
BENCHMARK(BM_IdealFixedPoint);

static void BM_PmfFloor(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pmf_floor(n, 1.0, 1.0, 0.4, true));
}
BENCHMARK(BM_PmfFloor)->Arg(256)->Arg(4096);

BENCHMARK_MAIN();
