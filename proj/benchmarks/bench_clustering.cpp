#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qshift/kmeans.hpp"
#include "qshift/spread.hpp"

namespace {

std::vector<float> gaussian(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  std::vector<float> v(n * dim);
  for (auto& x : v) x = g(rng);
  return v;
}

void BM_SpreadExact(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const auto f = gaussian(k, 768, 1);
  const std::vector<double> pts(f.begin(), f.end());
  for (auto _ : state)
    benchmark::DoNotOptimize(qshift::select_spread_subset(pts, 768, m, qshift::SpreadMode::Exact));
}
BENCHMARK(BM_SpreadExact)->Args({50, 5})->Args({100, 5})->Unit(benchmark::kMillisecond);

void BM_SpreadGreedy(benchmark::State& state) {
  const auto f = gaussian(100, 768, 2);
  const std::vector<double> pts(f.begin(), f.end());
  for (auto _ : state)
    benchmark::DoNotOptimize(qshift::select_spread_subset(pts, 768, 5, qshift::SpreadMode::Greedy));
}
BENCHMARK(BM_SpreadGreedy)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pts = gaussian(n, 64, 3);
  qshift::KMeansOptions o;
  o.k = 100;
  o.max_iter = 10;
  o.tol = 0.0;
  o.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(qshift::kmeans(pts, 64, o));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * o.max_iter));
}
BENCHMARK(BM_KMeans)->Args({10000, 1})->Args({10000, 4})->Unit(benchmark::kMillisecond);

}  // namespace
