#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "qshift/bm25.hpp"
#include "qshift/indicators.hpp"

namespace {

std::string random_text(std::mt19937_64& rng, std::size_t tokens, std::size_t vocab) {
  std::string s;
  for (std::size_t t = 0; t < tokens; ++t) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    s += (t ? " w" : "w") + std::to_string(static_cast<std::size_t>(u * u * vocab));
  }
  return s;
}

qshift::Collection make_collection(std::size_t docs) {
  std::mt19937_64 rng(7);
  std::vector<qshift::TextEntry> e;
  for (std::size_t i = 0; i < docs; ++i) e.push_back({"d" + std::to_string(i), random_text(rng, 60, 20000)});
  return qshift::Collection(std::move(e));
}

void BM_IndexBuild(benchmark::State& state) {
  const auto coll = make_collection(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qshift::InvertedIndex::build(coll));
}
BENCHMARK(BM_IndexBuild)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Search(benchmark::State& state) {
  static const auto index = qshift::InvertedIndex::build(make_collection(50000));
  std::mt19937_64 rng(8);
  std::vector<std::string> queries;
  for (int i = 0; i < 64; ++i) queries.push_back(random_text(rng, 6, 20000));
  std::size_t q = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qshift::search(index, queries[q++ % queries.size()], 1000));
}
BENCHMARK(BM_Search)->Unit(benchmark::kMicrosecond);

void BM_WeightedJaccard(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::vector<std::string> a, b;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(random_text(rng, 6, 30000));
    b.push_back(random_text(rng, 6, 30000));
  }
  const auto s = qshift::term_distribution(a), t = qshift::term_distribution(b);
  for (auto _ : state) benchmark::DoNotOptimize(qshift::weighted_jaccard(s, t));
}
BENCHMARK(BM_WeightedJaccard)->Unit(benchmark::kMicrosecond);

}  // namespace
