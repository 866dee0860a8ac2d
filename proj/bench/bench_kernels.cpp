#include <benchmark/benchmark.h>

#include <random>

#include "graphbal/kernels.hpp"
#include "graphbal/nngraph.hpp"
#include "graphbal/stats.hpp"

using namespace graphbal;

namespace {

Matrix points(int n, int d) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z;
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = z(gen);
  }
  return x;
}

template <void (*Kernel)(const Matrix&, std::span<double>)>
void distances(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix x = points(n, 10);
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (auto _ : state) {
    Kernel(x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(n);
}

template <void (*Kernel)(const Matrix&, int, std::span<int>)>
void knn_brute(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = std::max(1, n / 10);
  const Matrix x = points(n, 10);
  std::vector<int> out(static_cast<std::size_t>(n) * k);
  for (auto _ : state) {
    Kernel(x, k, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void permutation(benchmark::State& state, Execution exec) {
  const Matrix x = points(300, 10);
  const KnnGraph g = knn_graph(x, 30);
  const std::vector<int> sizes{50, 100, 150};
  const RandomStream rng(1, 1);
  for (auto _ : state) {
    auto null = permutation_null(StatisticKind::knn_counts, std::cref(g), sizes,
                                 NullMode::monte_carlo, state.range(0), rng, exec);
    benchmark::DoNotOptimize(null.empirical_cov.data());
  }
}

}  // namespace

BENCHMARK(distances<kernels::serial::pairwise_distances>)->Name("distances/serial")->Arg(300)->Arg(1500);
BENCHMARK(distances<kernels::omp::pairwise_distances>)->Name("distances/omp")->Arg(300)->Arg(1500);
BENCHMARK(knn_brute<kernels::serial::knn_brute_force>)->Name("knn_brute/serial")->Arg(300)->Arg(1500);
BENCHMARK(knn_brute<kernels::omp::knn_brute_force>)->Name("knn_brute/omp")->Arg(300)->Arg(1500);
BENCHMARK_CAPTURE(permutation, serial, Execution::serial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(permutation, omp, Execution::parallel)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
