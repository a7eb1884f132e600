// Parallel kernels against their serial references. Run with
// OMP_NUM_THREADS to compare scaling.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "transit/community.hpp"
#include "transit/parallel.hpp"
#include "transit/stats.hpp"

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> values(n);
  for (double& v : values) v = 1e-3 + (rng() >> 11) * 0x1.0p-53;
  return values;
}

void bm_sum_serial(benchmark::State& state) {
  const auto values = random_values(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transit::sum_serial(values));
  }
}
BENCHMARK(bm_sum_serial)->Arg(1 << 20);

void bm_sum_chunked(benchmark::State& state) {
  const auto values = random_values(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transit::sum_chunked(values));
  }
}
BENCHMARK(bm_sum_chunked)->Arg(1 << 20);

void bm_binned_density_serial(benchmark::State& state) {
  const auto values = random_values(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transit::log_binned_density_serial(values, 50));
  }
}
BENCHMARK(bm_binned_density_serial)->Arg(1 << 20);

void bm_binned_density_parallel(benchmark::State& state) {
  const auto values = random_values(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transit::log_binned_density(values, 50));
  }
}
BENCHMARK(bm_binned_density_parallel)->Arg(1 << 20);

void bm_smoother_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_values(n, 3);
  const auto y = random_values(n, 4);
  const auto grid = random_values(200, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transit::nadaraya_watson_serial(x, y, 0.05, grid));
  }
}
BENCHMARK(bm_smoother_serial)->Arg(2000);

void bm_smoother_parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_values(n, 3);
  const auto y = random_values(n, 4);
  const auto grid = random_values(200, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transit::nadaraya_watson(x, y, 0.05, grid));
  }
}
BENCHMARK(bm_smoother_parallel)->Arg(2000);

transit::UndirectedWeightedGraph ring_graph(std::uint32_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  transit::UndirectedWeightedGraph g(std::move(ids));
  std::mt19937_64 rng(6);
  for (std::uint32_t i = 0; i < n; ++i) {
    g.add_edge(i, (i + 1) % n, 1.0 + (rng() >> 11) * 0x1.0p-53);
    g.add_edge(i, (i + 7) % n, 1.0 + (rng() >> 11) * 0x1.0p-53);
  }
  g.finalize();
  return g;
}

void bm_modularity_serial(benchmark::State& state) {
  const auto g = ring_graph(static_cast<std::uint32_t>(state.range(0)));
  std::vector<std::uint32_t> assignment(g.n());
  for (std::uint32_t i = 0; i < g.n(); ++i) assignment[i] = i / 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transit::modularity_serial(g, assignment, 1.0));
  }
}
BENCHMARK(bm_modularity_serial)->Arg(2000);

void bm_modularity_parallel(benchmark::State& state) {
  const auto g = ring_graph(static_cast<std::uint32_t>(state.range(0)));
  std::vector<std::uint32_t> assignment(g.n());
  for (std::uint32_t i = 0; i < g.n(); ++i) assignment[i] = i / 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transit::modularity(g, assignment, 1.0));
  }
}
BENCHMARK(bm_modularity_parallel)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
