#include <benchmark/benchmark.h>

#include "netsentinel/rng.hpp"
#include "netsentinel/sim.hpp"

using namespace netsentinel;

namespace {

void bm_topology_generation(benchmark::State& state) {
    const auto n = static_cast<NodeId>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_topology(n, 100.0, 15.0, seed++));
    }
}
BENCHMARK(bm_topology_generation)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_routing_build(benchmark::State& state) {
    auto topo = generate_topology(static_cast<NodeId>(state.range(0)), 100.0, 15.0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(RoutingTable::build(topo));
    }
}
BENCHMARK(bm_routing_build)->Arg(200)->Unit(benchmark::kMillisecond);

// engine throughput in events/second under the experiment's default load
void bm_simulation_throughput(benchmark::State& state) {
    auto topo = generate_topology(50, 50.0, 15.0, 3);
    auto rt = RoutingTable::build(topo);
    SimParams p;
    p.sim_time = static_cast<double>(state.range(0));
    p.link_rate_bps = 1e7;
    p.queue_cap = 1000;
    std::uint64_t events = 0;
    for (auto _ : state) {
        Rng rng(9);
        Simulator sim(p, topo, rt);
        for (std::uint64_t k = 0; k < 10; ++k) {
            const auto s = static_cast<NodeId>(rng.uniform_int(50));
            auto d = static_cast<NodeId>(rng.uniform_int(49));
            if (d >= s) ++d;
            sim.add_flow(Flow{s, d, 5e5, 512, 0.0, p.sim_time, k});
        }
        std::uint64_t n = 0;
        sim.set_trace_sink([&n](const TraceRecord&) { ++n; });
        benchmark::DoNotOptimize(sim.run());
        events += n;
    }
    state.counters["trace_records_per_s"] =
        benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(bm_simulation_throughput)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

// a saturated bottleneck exercises the queue/drop path
void bm_saturated_queue(benchmark::State& state) {
    WeightedGraph g(2);
    g.add_edge(0, 1, 1.0);
    Topology topo;
    topo.side = 1.0;
    topo.radio_range = 1.0;
    topo.positions.resize(2);
    topo.graph = std::move(g);
    auto rt = RoutingTable::build(topo);
    SimParams p;
    p.sim_time = 5.0;
    p.link_rate_bps = 1e6;
    p.queue_cap = 100;
    for (auto _ : state) {
        Simulator sim(p, topo, rt);
        sim.add_flow(Flow{0, 1, 1e7, 512, 0.0, p.sim_time, 1});
        benchmark::DoNotOptimize(sim.run());
    }
}
BENCHMARK(bm_saturated_queue)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
