#include <benchmark/benchmark.h>

#include "selint/dgp.hpp"
#include "selint/montecarlo.hpp"
#include "selint/snn_estimator.hpp"
#include "selint/transform.hpp"

using namespace selint;

namespace {

LatentDraw draw_of(std::size_t n) {
  DgpSpec spec;
  spec.n = n;
  spec.rho = 0.5;
  spec.seed = 3;
  return simulate(spec);
}

void BM_EtaHat(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LatentDraw draw = draw_of(n);
  DgpSpec spec;
  const Vector gamma = true_gamma(spec);
  for (auto _ : state) benchmark::DoNotOptimize(eta_hat(draw.dataset.Z, gamma));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EtaHat)->RangeMultiplier(4)->Range(100, 25600)->Complexity(benchmark::oNLogN);

void BM_SnnIntercept(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LatentDraw draw = draw_of(n);
  DgpSpec spec;
  const Vector gamma = true_gamma(spec), beta = true_beta(spec);
  const KernelSpec kernel;
  for (auto _ : state)
    benchmark::DoNotOptimize(snn_intercept(draw.dataset, beta, gamma, kernel, BandwidthRule::plug_in()));
}
BENCHMARK(BM_SnnIntercept)->RangeMultiplier(4)->Range(100, 25600);

void BM_Simulate(benchmark::State& state) {
  DgpSpec spec;
  spec.n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    ++spec.seed;
    benchmark::DoNotOptimize(simulate(spec));
  }
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(1600);

void BM_RunCell(benchmark::State& state) {
  DgpSpec spec;
  spec.n = 100;
  const EstimatorConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(run_cell(spec, config, 100, 1));
}
BENCHMARK(BM_RunCell)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
