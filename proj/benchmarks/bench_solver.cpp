#include <benchmark/benchmark.h>

#include "ssfp/experiments/experiments.hpp"
#include "ssfp/instances/instances.hpp"
#include "ssfp/milp/lp_format.hpp"
#include "ssfp/models/models.hpp"
#include "ssfp/solver/branch_and_bound.hpp"
#include "ssfp/solver/simplex.hpp"

using namespace ssfp;

namespace {

ModelKind kind_of(int64_t i) {
  const Optimization o[] = {Optimization::kDO, Optimization::kRO, Optimization::kSO};
  return {o[i / 2], i % 2 ? Flow::kDirected : Flow::kUndirected};
}

void BM_BuildDeck(benchmark::State& state) {
  const auto ts = instances::fig2_instance(0.45);
  const ModelKind kind = kind_of(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(models::build(ts, kind));
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_BuildDeck)->DenseRange(0, 5);

void BM_SolveDeck(benchmark::State& state) {
  const ModelKind kind = kind_of(state.range(0));
  const auto bm = models::build(instances::fig2_instance(0.45), kind);
  for (auto _ : state) benchmark::DoNotOptimize(solver::solve_milp(bm.milp));
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_SolveDeck)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_RootLpRandom(benchmark::State& state) {
  const auto ts = instances::random_artificial({3, 2, 4}, 1);
  const ModelKind kind = kind_of(state.range(0));
  const auto relaxed = milp::relax(models::build(ts, kind).milp);
  for (auto _ : state) benchmark::DoNotOptimize(solver::solve_lp(relaxed));
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_RootLpRandom)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_SolveRandomDirected(benchmark::State& state) {
  const auto ts = instances::random_artificial({2, 1, 3}, 1);
  const ModelKind kind = kind_of(state.range(0));
  const auto bm = models::build(ts, kind);
  solver::BnbConfig cfg;
  cfg.branching = solver::Branching::kReliability;
  for (auto _ : state) benchmark::DoNotOptimize(solver::solve_milp(bm.milp, cfg));
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_SolveRandomDirected)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_LpExportParse(benchmark::State& state) {
  const auto bm = models::build(instances::fig2_instance(0.3), {Optimization::kSO, Flow::kDirected});
  for (auto _ : state) benchmark::DoNotOptimize(milp::parse_lp(milp::export_lp(bm.milp)));
}
BENCHMARK(BM_LpExportParse);

void BM_CostCurves(benchmark::State& state) {
  const auto ts = instances::fig2_instance();
  const auto grid = experiments::parse_grid("0:1:0.01");
  for (auto _ : state) benchmark::DoNotOptimize(experiments::cost_curves(ts, grid));
}
BENCHMARK(BM_CostCurves)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive is LTO bytecode from another compiler build.
BENCHMARK_MAIN();
