#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "netsentinel/sim.hpp"

namespace netsentinel {

/// Attack shape: how many nodes start corrupted, when they wake up, and
/// what each corrupted node floods.
struct AttackConfig {
    std::uint32_t t_seeds = 2;
    double injection_time = 100.0;
    double anomaly_rate_bps = 10e6;
    std::uint32_t gibberish_packet_size = 4096; // bytes
};

/// Per-node infection record. Transitions are one way: a node is safe
/// until its infection time and infected forever after.
class InfectionState {
public:
    explicit InfectionState(NodeId n);

    NodeId node_count() const { return static_cast<NodeId>(time_.size()); }

    bool infected(NodeId v, double now) const { return time_[v] <= now; }
    bool ever_infected(NodeId v) const;

    /// +infinity while safe.
    double infection_time(NodeId v) const { return time_[v]; }
    const std::vector<double>& times() const { return time_; }

    NodeId infected_count() const;

    /// Records the transition; keeps the earliest time if called twice.
    void infect(NodeId v, double t);

private:
    std::vector<double> time_;
};

/// Marks t_seeds distinct nodes as infected at injection_time. The draw is
/// deterministic in rng_seed and independent of everything else.
void seed_attack(InfectionState& state, const AttackConfig& attack, std::uint64_t rng_seed);

/// Delivery-time transition: a safe receiver of a contaminated packet
/// becomes infected at that moment. Returns true on a fresh infection.
bool propagate_on_receive(InfectionState& state, NodeId receiver, bool carrier_contaminated,
                          double time);

/// The flood a node emits once infected: constant bit rate at
/// anomaly_rate_bps toward one destination drawn uniformly from the other
/// nodes. The destination comes from a per-node stream derived from
/// rng_seed, so it does not depend on infection order. Flow ids start at
/// kAnomalousFlowBase + node.
Flow anomalous_flow(NodeId node, double infection_time, double stop, const AttackConfig& attack,
                    std::uint64_t rng_seed, NodeId node_count);

/// Floods for every currently infected node (used for the seed set).
std::vector<Flow> inject_anomalous_flows(const InfectionState& state, const AttackConfig& attack,
                                         std::uint64_t rng_seed, double stop);

/// Wires the full threat behavior into a simulator run:
///  - packets leaving an infected node are marked contaminated,
///  - a safe node receiving a contaminated packet becomes infected,
///  - every infected node starts its flood the moment it is infected
///    (seeds at injection_time).
/// Existing simulator hooks keep running; state must outlive the run.
void attach_attack(Simulator& sim, InfectionState& state, const AttackConfig& attack,
                   std::uint64_t rng_seed);

/// CSV: node,infection_time — infected nodes only, ascending node id,
/// times with 6 decimals.
void write_infection_csv(const InfectionState& state, std::ostream& out);

} // namespace netsentinel
