#include <benchmark/benchmark.h>

#include "levdyn/attractor.hpp"
#include "levdyn/lyapunov.hpp"
#include "levdyn/microstructure.hpp"
#include "levdyn/orbit.hpp"

using namespace levdyn;

namespace {

void BM_EvalCoupled(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  ModelParams p;
  for (std::size_t i = 0; i < n; ++i) {
    p.omegas.push_back(0.5);
    p.pis.push_back(1.0 / double(n));
  }
  auto s = LeverageState::make(std::vector<double>(n, 60.0), p);
  for (auto _ : st) {
    s = eval_coupled(s, p);
    benchmark::DoNotOptimize(s.lambdas.data());
  }
}
BENCHMARK(BM_EvalCoupled)->Arg(1)->Arg(2)->Arg(8);

void BM_Iterate(benchmark::State& st) {
  const auto p = ModelParams::pair(0.5, 0.3, 0.5);
  const auto s = LeverageState::make({40.0, 50.0}, p);
  for (auto _ : st) benchmark::DoNotOptimize(iterate(s, p, 1000, 10000));
}
BENCHMARK(BM_Iterate)->Unit(benchmark::kMillisecond);

void BM_LyapunovSpectrum(benchmark::State& st) {
  const auto p = ModelParams::pair(0.5, 0.3, 0.5);
  const auto s = LeverageState::make({40.0, 50.0}, p);
  for (auto _ : st) benchmark::DoNotOptimize(lyapunov_spectrum(s, p, 1000, 10000));
}
BENCHMARK(BM_LyapunovSpectrum)->Unit(benchmark::kMillisecond);

void BM_BoxDimension(benchmark::State& st) {
  const auto p = ModelParams::pair(0.5, 0.3, 0.5);
  const auto cloud = capture_cloud(LeverageState::make({40.0, 50.0}, p), p, 1000,
                                   static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(box_dimension(cloud));
}
BENCHMARK(BM_BoxDimension)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_MicroRun(benchmark::State& st) {
  MicroParams m;
  m.base = ModelParams::single(0.8);
  m.n_intraday = static_cast<std::size_t>(st.range(0));
  m.horizon = 10;
  m.rng_seed = 1;
  const std::vector<double> init{70.0};
  for (auto _ : st) benchmark::DoNotOptimize(run_micro(m, init));
}
BENCHMARK(BM_MicroRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
