#include <benchmark/benchmark.h>

#include <random>

#include "svar/solver.hpp"

using namespace svar;

namespace {

void BM_UnivariateUpdate(benchmark::State& state) {
  const PenaltySpec spec = state.range(0) == 0   ? PenaltySpec::lasso(0.3)
                           : state.range(0) == 1 ? PenaltySpec::scad(0.3, 3.7)
                                                 : PenaltySpec::mcp(0.3, 1.5);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> zs(1024);
  for (double& x : zs) x = z(rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(univariate_update(zs[i++ & 1023], 0.8, spec));
  }
}
BENCHMARK(BM_UnivariateUpdate)->Arg(0)->Arg(1)->Arg(2);

Moments sample(std::size_t T) {
  const Regression reg = build_regression(simulate(reference_design(), NoiseSpec(reference_noise_factor(), 7), T), 2);
  return Moments::from(reg.X, reg.Y);
}

void BM_FitAtLambda(benchmark::State& state) {
  const Moments m = sample(static_cast<std::size_t>(state.range(0)));
  const WeightingMatrix w = WeightingMatrix::identity(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_at_lambda(m, w, PenaltySpec::scad(0.05, 20.0)).theta.data());
  }
}
BENCHMARK(BM_FitAtLambda)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitPath(benchmark::State& state) {
  const Moments m = sample(500);
  const WeightingMatrix w = WeightingMatrix::identity(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_path(m, w, PenaltySpec::lasso(0)).size());
  }
}
BENCHMARK(BM_FitPath)->Unit(benchmark::kMillisecond);

void BM_CrossValidate(benchmark::State& state) {
  const TimeSeriesData d = simulate(reference_design(), NoiseSpec(reference_noise_factor(), 3), 300);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cross_validate(d, 2, WeightingMatrix::identity(8), PenaltySpec::scad(0, 20.0)).best_lambda);
  }
}
BENCHMARK(BM_CrossValidate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
