#include <benchmark/benchmark.h>

#include "basketsdp/oracle.h"
#include "basketsdp/relaxation.h"

using namespace basketsdp;

namespace {

MarketSpec merton() {
  MarketSpec mk;
  mk.forwards = {1.0};
  mk.support = SupportKind::kCompact;
  mk.box_upper = {2.0};
  mk.baskets = {{{1.0}, 1.0}};
  return mk;
}

MarketSpec two_asset() {
  return random_consistent_market(7, 2, 2, {2.0, 2.0}).market;
}

RelaxationSpec spec(int order) {
  RelaxationSpec s;
  s.order = order;
  return s;
}

void BM_AssembleMerton(benchmark::State& state) {
  const MarketSpec mk = merton();
  for (auto _ : state) benchmark::DoNotOptimize(assemble(mk, spec(state.range(0))));
}

void BM_AssembleTwoAsset(benchmark::State& state) {
  const MarketSpec mk = two_asset();
  for (auto _ : state) benchmark::DoNotOptimize(assemble(mk, spec(state.range(0))));
}

void BM_SolveMerton(benchmark::State& state) {
  const ConicProblem p = assemble(merton(), spec(state.range(0)));
  const InteriorPointSolver ipm;
  for (auto _ : state) benchmark::DoNotOptimize(solve_bound(p, ipm, 1e-7));
}

void BM_SolveTwoAsset(benchmark::State& state) {
  const ConicProblem p = assemble(two_asset(), spec(state.range(0)));
  const InteriorPointSolver ipm;
  for (auto _ : state) benchmark::DoNotOptimize(solve_bound(p, ipm, 1e-7));
}

void BM_GridOracleMerton(benchmark::State& state) {
  const MarketSpec mk = merton();
  const InteriorPointSolver ipm;
  const GridSpec grid{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(lp_bounds(mk, grid, ipm));
}

}  // namespace

BENCHMARK(BM_AssembleMerton)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AssembleTwoAsset)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SolveMerton)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveTwoAsset)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridOracleMerton)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
