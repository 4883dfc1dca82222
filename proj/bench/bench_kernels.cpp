#include <benchmark/benchmark.h>

#include <random>

#include "tagdl/eval/aggregate.hpp"
#include "tagdl/eval/engine.hpp"
#include "tagdl/eval/kernels.hpp"
#include "tagdl/frontend/compiler.hpp"
#include "tagdl/provenance/basic.hpp"

using namespace tagdl;

namespace {

TaggedTuples<double> rows(std::size_t n, std::uint64_t domain, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TaggedTuples<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({Tuple{Value::usize(rng() % domain), Value::usize(rng() % domain)},
                   static_cast<double>(rng() % 1000) / 1000.0});
  }
  return out;
}

void BM_JoinSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = rows(n, n / 4 + 1, 1), b = rows(n, n / 4 + 1, 2);
  const MinMaxProb prov;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::join_serial(prov, a, b, 1));
}
BENCHMARK(BM_JoinSerial)->Range(256, 4096);

void BM_JoinParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = rows(n, n / 4 + 1, 1), b = rows(n, n / 4 + 1, 2);
  const MinMaxProb prov;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::join_parallel(prov, a, b, 1));
}
BENCHMARK(BM_JoinParallel)->Range(256, 4096);

void BM_ProductSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = rows(n, 100, 3), b = rows(n, 100, 4);
  const MinMaxProb prov;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::product_serial(prov, a, b));
}
BENCHMARK(BM_ProductSerial)->Range(64, 1024);

void BM_ProductParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = rows(n, 100, 3), b = rows(n, 100, 4);
  const MinMaxProb prov;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::product_parallel(prov, a, b));
}
BENCHMARK(BM_ProductParallel)->Range(64, 1024);

void BM_CountWorlds(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = rows(n, 1u << 20, 5);
  const AddMultProb prov;
  AggregateOptions opts;
  opts.world_cap = 20;
  opts.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_worlds(prov, ram::Aggregator{}, in, opts));
}
BENCHMARK(BM_CountWorlds)->ArgsProduct({{8, 12, 16}, {0, 1}});

void BM_MinMaxCount(benchmark::State& state) {
  const auto in = rows(static_cast<std::size_t>(state.range(0)), 1u << 20, 6);
  const MinMaxProb prov;
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_worlds(prov, ram::Aggregator{}, in, {}));
}
BENCHMARK(BM_MinMaxCount)->Range(16, 4096);

void BM_TransitiveClosure(benchmark::State& state) {
  const auto n = state.range(0);
  std::string src = "type edge(usize, usize)\n";
  for (std::int64_t i = 0; i + 1 < n; ++i) {
    src += "rel 0.9::edge(" + std::to_string(i) + ", " + std::to_string(i + 1) + ")\n";
  }
  src += "rel path(a, b) = edge(a, b) or (path(a, c) and edge(c, b))\nquery path\n";
  const auto c = compile(src);
  const std::string prov = state.range(1) ? "minmaxprob" : "unit";
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(c.ram, c.facts, prov));
}
BENCHMARK(BM_TransitiveClosure)->ArgsProduct({{16, 64}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();
