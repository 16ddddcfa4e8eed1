#include <benchmark/benchmark.h>

#include <vector>

#include "fairrelay/analytic.hpp"
#include "fairrelay/optimizer.hpp"
#include "fairrelay/simulator.hpp"

using namespace fairrelay;

namespace {

const ProposedModel& shared_model() {
  static const ProposedModel model(SystemParams{}, make_rayleigh());
  return model;
}

std::vector<double> z_grid(int n) {
  std::vector<double> z;
  for (int k = 1; k <= n; ++k) z.push_back(static_cast<double>(k) / n);
  return z;
}

}  // namespace

// Model construction: level-set area profile and Chebyshev tables.
static void BM_ProposedModelBuild(benchmark::State& state) {
  for (auto _ : state) {
    ProposedModel m(SystemParams{}, make_rayleigh());
    benchmark::DoNotOptimize(m.gbar());
  }
}
BENCHMARK(BM_ProposedModelBuild)->Unit(benchmark::kMillisecond);

static void BM_GProfile(benchmark::State& state) {
  const auto& m = shared_model();
  double x = 0.0;
  for (auto _ : state) {
    x = x >= 1.0 ? 0.01 : x + 0.01;
    benchmark::DoNotOptimize(m.g(x, 1.0));
  }
}
BENCHMARK(BM_GProfile);

static void BM_PavgGrid(benchmark::State& state) {
  const auto& m = shared_model();
  const auto z = z_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(m.pavg_grid(z, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PavgGrid)->Arg(25)->Arg(101)->Unit(benchmark::kMillisecond);

static void BM_OpportunisticPavg(benchmark::State& state) {
  const OpportunisticModel m(SystemParams{}, make_rayleigh());
  for (auto _ : state) benchmark::DoNotOptimize(m.pavg({0.75, 0.75}));
}
BENCHMARK(BM_OpportunisticPavg)->Unit(benchmark::kMicrosecond);

static void BM_MonteCarloTrials(benchmark::State& state) {
  const SystemParams p;
  const auto f = make_rayleigh();
  const std::vector<Scheme> schemes{Scheme::proposed(1.0), Scheme::opportunistic()};
  const std::vector<ProbeSpec> probes{{{0.5, 0.5}}};
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_batch(p, *f, schemes, probes, 10000, seed++));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_MonteCarloTrials)->Unit(benchmark::kMillisecond);

static void BM_OptimizeBeta(benchmark::State& state) {
  const auto& m = shared_model();
  for (auto _ : state) benchmark::DoNotOptimize(optimize_beta(m, BetaSearchConfig{}));
}
BENCHMARK(BM_OptimizeBeta)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
