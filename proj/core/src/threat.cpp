#include "netsentinel/threat.hpp"

#include <cstdio>
#include <limits>
#include <ostream>
#include <utility>

namespace netsentinel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

InfectionState::InfectionState(NodeId n) : time_(n, kInf) {}

bool InfectionState::ever_infected(NodeId v) const { return time_[v] < kInf; }

NodeId InfectionState::infected_count() const {
    NodeId c = 0;
    for (double t : time_) c += (t < kInf) ? 1 : 0;
    return c;
}

void InfectionState::infect(NodeId v, double t) {
    if (v >= time_.size()) throw ConfigError("node out of range");
    if (t < time_[v]) time_[v] = t;
}

void seed_attack(InfectionState& state, const AttackConfig& attack, std::uint64_t rng_seed) {
    const NodeId n = state.node_count();
    if (attack.t_seeds == 0) throw ConfigError("attack needs at least one seed node");
    if (attack.t_seeds > n) throw ConfigError("more seed nodes than nodes");
    if (attack.injection_time < 0.0) throw ConfigError("injection time must be >= 0");
    Rng rng(Rng::derive(rng_seed, 0x5eedULL));
    for (const auto v : rng.sample_without_replacement(n, attack.t_seeds)) {
        state.infect(v, attack.injection_time);
    }
}

bool propagate_on_receive(InfectionState& state, NodeId receiver, bool carrier_contaminated,
                          double time) {
    if (!carrier_contaminated) return false;
    if (state.infected(receiver, time)) return false;
    state.infect(receiver, time);
    return true;
}

Flow anomalous_flow(NodeId node, double infection_time, double stop, const AttackConfig& attack,
                    std::uint64_t rng_seed, NodeId node_count) {
    if (node_count < 2) throw ConfigError("anomalous flow needs at least 2 nodes");
    if (!(attack.anomaly_rate_bps > 0.0)) throw ConfigError("anomaly rate must be positive");
    if (attack.gibberish_packet_size == 0) throw ConfigError("gibberish packet size must be positive");
    Rng dest_rng(Rng::derive(rng_seed, node));
    NodeId dest = static_cast<NodeId>(dest_rng.uniform_int(node_count - 1));
    if (dest >= node) ++dest; // uniform over the other nodes
    Flow f;
    f.source = node;
    f.destination = dest;
    f.rate_bps = attack.anomaly_rate_bps;
    f.packet_size = attack.gibberish_packet_size;
    f.start = infection_time;
    f.stop = stop;
    f.flow_id = kAnomalousFlowBase + node;
    return f;
}

std::vector<Flow> inject_anomalous_flows(const InfectionState& state, const AttackConfig& attack,
                                         std::uint64_t rng_seed, double stop) {
    std::vector<Flow> flows;
    for (NodeId v = 0; v < state.node_count(); ++v) {
        if (state.ever_infected(v) && state.infection_time(v) < stop) {
            flows.push_back(
                anomalous_flow(v, state.infection_time(v), stop, attack, rng_seed,
                               state.node_count()));
        }
    }
    return flows;
}

void attach_attack(Simulator& sim, InfectionState& state, const AttackConfig& attack,
                   std::uint64_t rng_seed) {
    const double stop = sim.params().sim_time;
    for (const auto& f : inject_anomalous_flows(state, attack, rng_seed, stop)) {
        sim.add_flow(f);
    }
    SimHooks& hooks = sim.hooks();
    auto prev_transmit = std::move(hooks.on_transmit);
    hooks.on_transmit = [&state, prev = std::move(prev_transmit)](double t, NodeId node,
                                                                  Packet& p) {
        if (state.infected(node, t)) p.marked = true;
        if (prev) prev(t, node, p);
    };
    auto prev_deliver = std::move(hooks.on_deliver);
    hooks.on_deliver = [&sim, &state, attack, rng_seed, stop,
                        prev = std::move(prev_deliver)](double t, NodeId node, const Packet& p,
                                                        bool final_hop) {
        if (propagate_on_receive(state, node, p.marked, t) && t < stop) {
            sim.add_flow(anomalous_flow(node, t, stop, attack, rng_seed,
                                        state.node_count()));
        }
        if (prev) prev(t, node, p, final_hop);
    };
}

void write_infection_csv(const InfectionState& state, std::ostream& out) {
    out << "node,infection_time\n";
    char buf[64];
    for (NodeId v = 0; v < state.node_count(); ++v) {
        if (state.ever_infected(v)) {
            const int len = std::snprintf(buf, sizeof buf, "%u,%.6f\n", v,
                                          state.infection_time(v));
            out.write(buf, len);
        }
    }
}

} // namespace netsentinel
