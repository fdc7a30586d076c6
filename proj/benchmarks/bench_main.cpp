#include <benchmark/benchmark.h>

#include <random>

#include "daas/clustering.hpp"
#include "daas/datamodel.hpp"
#include "daas/slaopt.hpp"
#include "daas/som.hpp"

namespace {

daas::Dataset uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<daas::DataPoint> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    points[i].id = std::to_string(i);
    points[i].features.resize(d);
    for (double& v : points[i].features) {
      v = u(rng);
    }
  }
  return daas::Dataset(std::move(points));
}

void BM_Kmeans(benchmark::State& state) {
  const auto ds = uniform(static_cast<std::size_t>(state.range(0)), 8, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(daas::clustering::kmeans(ds, 16, 3).wcss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Kmeans)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SomTrain(benchmark::State& state) {
  const auto ds = uniform(1000, 8, 2);
  const auto lattice = daas::som::build_lattice(20, 20, daas::som::Topology::hexagonal);
  daas::som::SomParams params;
  params.iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(daas::som::train(ds, lattice, params).final_qe);
  }
}
BENCHMARK(BM_SomTrain)->Arg(10)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Greedy(benchmark::State& state) {
  daas::slaopt::AllocationProblem p;
  for (int i = 0; i < state.range(0); ++i) {
    p.classes.push_back({1.0 + 0.1 * (i % 10), 1.5, 1.0 + i % 7, 0.5});
  }
  p.servers = 10 * state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(daas::slaopt::optimize_greedy(p));
  }
}
BENCHMARK(BM_Greedy)->Arg(4)->Arg(64)->Arg(1024);

} // namespace

BENCHMARK_MAIN();
