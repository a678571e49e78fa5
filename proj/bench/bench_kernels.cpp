// Serial reference vs OpenMP paths: projector aggregation and the Monte Carlo
// trial loop.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "edgeview/harness.hpp"
#include "edgeview/kernels.hpp"

namespace {

using edgeview::Index;
using edgeview::Matrix;

std::vector<Matrix> random_views(Index rows, Index n, int count) {
  std::mt19937_64 g(17);
  std::normal_distribution<double> d;
  std::vector<Matrix> views;
  for (int i = 0; i < count; ++i) views.push_back(Matrix::NullaryExpr(rows, n, [&] { return d(g); }));
  return views;
}

void BM_AggregateSerial(benchmark::State& state) {
  const auto views = random_views(24, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(edgeview::kernels::aggregate_serial(views, std::nullopt));
}

void BM_AggregateParallel(benchmark::State& state) {
  const auto views = random_views(24, state.range(0), 3);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(edgeview::kernels::aggregate_parallel(views, std::nullopt, threads));
}

edgeview::harness::ExperimentSpec trial_spec(int workers) {
  auto spec = edgeview::harness::sweep_preset("fig5");
  spec.values = {4.0};
  spec.trials = 16;
  spec.methods = {edgeview::harness::Method::Gcca3, edgeview::harness::Method::Mmse};
  spec.workers = workers;
  return spec;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const auto spec = trial_spec(1);
  for (auto _ : state) benchmark::DoNotOptimize(edgeview::harness::run_monte_carlo_serial(spec));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const auto spec = trial_spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(edgeview::harness::run_monte_carlo(spec));
}

}  // namespace

BENCHMARK(BM_AggregateSerial)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateParallel)->ArgsProduct({{200, 800}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
