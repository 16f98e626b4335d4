#include <benchmark/benchmark.h>

#include <cmath>

#include "layergraph/distributions.hpp"
#include "layergraph/estimators.hpp"
#include "layergraph/layer_model.hpp"
#include "layergraph/simulator.hpp"
#include "layergraph/theory.hpp"

using namespace layergraph;

namespace {

ExperimentConfig fixed_type(std::size_t n) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.m = n;
  cfg.P = LayerTypeDistribution::point(3, 0.5);
  cfg.master_seed = 7;
  return cfg;
}

void BM_Generate(benchmark::State& state) {
  const auto cfg = fixed_type(static_cast<std::size_t>(state.range(0)));
  std::size_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate(cfg, rep++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->RangeMultiplier(10)->Range(10'000, 1'000'000)->Unit(benchmark::kMillisecond);

void BM_GeneratePowerLaw(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.n = static_cast<std::size_t>(state.range(0));
  cfg.m = cfg.n;
  cfg.P = power_law_distribution(3.5, 0.5, 1.0, 1, 10000);
  std::size_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate(cfg, rep++));
}
BENCHMARK(BM_GeneratePowerLaw)->Arg(200'000)->Unit(benchmark::kMillisecond);

void BM_Triangles(benchmark::State& state) {
  const auto G = generate(fixed_type(static_cast<std::size_t>(state.range(0))), 0);
  const Adjacency adj(G);
  for (auto _ : state) benchmark::DoNotOptimize(count_triangles(adj));
}
BENCHMARK(BM_Triangles)->RangeMultiplier(10)->Range(10'000, 1'000'000)->Unit(benchmark::kMillisecond);

void BM_Components(benchmark::State& state) {
  const auto G = generate(fixed_type(static_cast<std::size_t>(state.range(0))), 0);
  for (auto _ : state) benchmark::DoNotOptimize(components(G));
}
BENCHMARK(BM_Components)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_CompoundPoisson(benchmark::State& state) {
  const Pmf g = binomial_pmf(static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(compound_poisson(3.0, g, 1e-14));
}
BENCHMARK(BM_CompoundPoisson)->Arg(2)->Arg(20)->Arg(200);

void BM_LimitingDegreePowerLaw(benchmark::State& state) {
  const ModelLimit M{1.0, power_law_distribution(3.5, 0.5, 1.0, 1, static_cast<std::size_t>(state.range(0)))};
  for (auto _ : state) benchmark::DoNotOptimize(limiting_degree_distribution(M, 1e-12));
}
BENCHMARK(BM_LimitingDegreePowerLaw)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

// Distinct strengths per iteration so the connectivity memo does not hide
// the table construction.
void BM_BinPlus(benchmark::State& state) {
  const auto x = static_cast<std::size_t>(state.range(0));
  double y = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bin_plus(x, y));
    y = std::nextafter(y, 1.0);
  }
}
BENCHMARK(BM_BinPlus)->Arg(5)->Arg(50)->Arg(256);

void BM_ExpectedTransitiveDegreeLarge(benchmark::State& state) {
  const auto x = static_cast<std::size_t>(state.range(0));
  double c = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_transitive_degree(x, c / static_cast<double>(x)));
    c = c < 3.0 ? c + 1e-3 : 0.5;
  }
}
BENCHMARK(BM_ExpectedTransitiveDegreeLarge)->Arg(100'000);

}  // namespace

BENCHMARK_MAIN();
