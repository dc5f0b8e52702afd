#include <cmath>

#include <benchmark/benchmark.h>

#include "netsentinel/centrality.hpp"
#include "netsentinel/sim.hpp"

using namespace netsentinel;

namespace {

// the production shape: a geometric mesh at the experiment's density
WeightedGraph mesh(NodeId n) {
    const double side = 100.0 * std::sqrt(static_cast<double>(n) / 200.0);
    return generate_topology(n, side, 15.0, 7).graph;
}

void bm_information_exact(benchmark::State& state) {
    auto g = mesh(static_cast<NodeId>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(information_centrality(g, Measure::information_exact));
    }
}
BENCHMARK(bm_information_exact)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_betweenness(benchmark::State& state) {
    auto g = mesh(static_cast<NodeId>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(betweenness_centrality(g));
    }
}
BENCHMARK(bm_betweenness)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_closeness(benchmark::State& state) {
    auto g = mesh(static_cast<NodeId>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(closeness_centrality(g));
    }
}
BENCHMARK(bm_closeness)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_eigenvector(benchmark::State& state) {
    auto g = mesh(static_cast<NodeId>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigenvector_centrality(g));
    }
}
BENCHMARK(bm_eigenvector)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_pathsum_pair(benchmark::State& state) {
    // exponential route; stays feasible on small dense graphs only
    WeightedGraph g(8);
    for (NodeId u = 0; u < 8; ++u) {
        for (NodeId v = u + 1; v < 8; ++v) g.add_edge(u, v, 1.0 + 0.1 * (u + v));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(information_measure_pathsum(g, 0, 7, 7));
    }
}
BENCHMARK(bm_pathsum_pair)->Unit(benchmark::kMicrosecond);

} // namespace
