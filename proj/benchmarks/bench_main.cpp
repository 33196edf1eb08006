#include <limits>

#include <benchmark/benchmark.h>

#include "bsaomp/estimators.hpp"
#include "bsaomp/experiment.hpp"

namespace {

using namespace bsaomp;

SystemConfig desk() { return desk_preset().system; }

void BM_DictionarySlice(benchmark::State& state) {
  auto cfg = desk();
  cfg.grid_size = static_cast<int>(state.range(0));
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  int m = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dict.slice(m));
    m = (m + 1) % cfg.num_subcarriers;
  }
}
BENCHMARK(BM_DictionarySlice)->Arg(256)->Arg(512)->Arg(2048);

void BM_CorrelationScan(benchmark::State& state) {
  auto cfg = desk();
  cfg.grid_size = static_cast<int>(state.range(0));
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  const auto plan = random_pilot_plan(cfg, 1);
  const SensingKernel kernel(plan, dict);
  Rng rng(2);
  CVector r(plan.measurements());
  for (Index i = 0; i < r.size(); ++i) {
    r(i) = complex_normal(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel.correlate_normalized(r, 0));
  }
}
BENCHMARK(BM_CorrelationScan)->Arg(256)->Arg(512);

void BM_BsaOmp(benchmark::State& state) {
  const auto cfg = desk();
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  const auto plan = random_pilot_plan(cfg, 3);
  const SensingKernel kernel(plan, dict);
  const auto paths = sample_paths(cfg, 4, GridMode::on_grid);
  const auto y = measure(synthesize_channel(paths, 0, cfg), plan, 10.0, 5);
  OmpOptions opts;
  opts.num_paths = cfg.num_paths;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsa_omp(y, kernel, opts));
  }
}
BENCHMARK(BM_BsaOmp)->Unit(benchmark::kMillisecond);

void BM_Mmse(benchmark::State& state) {
  const auto cfg = desk();
  const auto plan = random_pilot_plan(cfg.bs_antennas, cfg.bs_antennas, cfg.ue_antennas, cfg.ue_antennas, 6);
  const KroneckerOperator G(plan);
  const MmseEstimator est(G, channel_covariance(cfg, 0, GridMode::on_grid));
  const auto y = measure(synthesize_channel(sample_paths(cfg, 7, GridMode::on_grid), 0, cfg), plan, 10.0, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.estimate(y.y[0], y.noise_variance));
  }
}
BENCHMARK(BM_Mmse)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
