#include <benchmark/benchmark.h>

#include "mmot/ingest.hpp"
#include "mmot/potential.hpp"
#include "mmot/solvers.hpp"

namespace {

using namespace mmot;

const CostSpec kCoulomb{1.0, 0.0};

void BM_ExactLP(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Density density = make_exponential(1.0, 8.0, m, n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact_lp(density, kCoulomb));
}
BENCHMARK(BM_ExactLP)->Args({16, 2})->Args({32, 2})->Args({64, 2})->Args({16, 3})
    ->Unit(benchmark::kMillisecond);

void BM_Sinkhorn(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Density density = make_exponential(1.0, 8.0, m, n);
  SinkhornOptions options;
  options.epsilon_schedule = scaled_schedule(density, kCoulomb, {1, 0.3, 0.1, 0.03, 0.01});
  for (auto _ : state) benchmark::DoNotOptimize(solve_sinkhorn_mm(density, kCoulomb, options));
}
BENCHMARK(BM_Sinkhorn)->Args({32, 2})->Args({64, 2})->Args({32, 3})
    ->Unit(benchmark::kMillisecond);

void BM_Seidl(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Density density = make_exponential(1.0, 40.0, m, n);
  for (auto _ : state) benchmark::DoNotOptimize(seidl_map_1d(density, kCoulomb));
}
BENCHMARK(BM_Seidl)->Args({256, 2})->Args({512, 2})->Args({256, 3})->Args({512, 3})
    ->Unit(benchmark::kMillisecond);

void BM_Normalize(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Density density = make_exponential(1.0, 40.0, m, n);
  const auto solved = seidl_map_1d(density, kCoulomb);
  const CostSpec spec{1.0, 1e-3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(eqv_normalize(solved.dual_potential, n, spec));
  }
}
BENCHMARK(BM_Normalize)->Args({256, 2})->Args({256, 3})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
