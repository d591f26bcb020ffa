// Serial reference vs OpenMP Fisher-Jenks kernel on sorted random data.
#include "mapcolor/classification.hpp"
#include "mapcolor/kernels.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

namespace {

using namespace mapcolor;

kernels::WeightedValues make_values(std::size_t n) {
  std::mt19937_64 rng(42);
  std::lognormal_distribution<double> dist(8.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  std::sort(v.begin(), v.end());
  return kernels::collapse_ties(v);
}

void BM_Serial(benchmark::State& state) {
  const auto wv = make_values(static_cast<std::size_t>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::fisher_jenks_serial(wv, k));
  state.SetComplexityN(state.range(0));
}

void BM_Parallel(benchmark::State& state) {
  const auto wv = make_values(static_cast<std::size_t>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::fisher_jenks_parallel(wv, k));
  state.SetComplexityN(state.range(0));
}

void BM_ClassifyAll(benchmark::State& state) {
  const auto wv = make_values(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(classify_all(wv.values, 5));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {64, 512, 2048, 4096}) {
    for (long k : {5, 11}) b->Args({n, k});
  }
}

}  // namespace

BENCHMARK(BM_Serial)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Parallel)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ClassifyAll)->Arg(31)->Arg(1000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
