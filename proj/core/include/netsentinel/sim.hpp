#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "netsentinel/graph.hpp"
#include "netsentinel/rng.hpp"

namespace netsentinel {

/// Node placement in a square area plus the radio-range communication
/// graph it induces: one unit-weight edge per pair within radio_range.
struct Topology {
    struct Point {
        double x = 0.0;
        double y = 0.0;
    };

    double side = 0.0;
    double radio_range = 0.0;
    std::vector<Point> positions;
    WeightedGraph graph{0};

    NodeId node_count() const { return graph.node_count(); }
};

/// Draws node positions uniformly in [0,side]^2 until the induced graph is
/// connected; gives up with TopologyError after 1000 attempts.
Topology generate_topology(NodeId n, double side, double radio_range, std::uint64_t seed);

/// Static minimum-hop next-hop tables over a topology. Ties are broken by
/// the lowest neighbor id, so routes are deterministic and loop-free.
class RoutingTable {
public:
    static RoutingTable build(const Topology& topo);

    NodeId node_count() const { return n_; }

    /// Neighbor of `from` on a minimum-hop path to dest; next_hop(d, d) == d.
    NodeId next_hop(NodeId from, NodeId dest) const;

    /// Full vertex sequence from `from` to dest, endpoints included.
    std::vector<NodeId> route(NodeId from, NodeId dest) const;

private:
    NodeId n_ = 0;
    std::vector<NodeId> table_; // n*n, row = from, col = dest
};

RoutingTable build_routing(const Topology& topo);

/// Constant-bit-rate flow. Packets of packet_size bytes leave the source
/// every packet_size*8/rate_bps seconds from `start` until `stop`.
struct Flow {
    NodeId source = 0;
    NodeId destination = 0;
    double rate_bps = 0.0;
    std::uint32_t packet_size = 0; // bytes
    double start = 0.0;
    double stop = 0.0;
    std::uint64_t flow_id = 0;

    double gap() const { return packet_size * 8.0 / rate_bps; }
};

/// Flow ids at or above this base mark attacker-injected traffic.
inline constexpr std::uint64_t kAnomalousFlowBase = 1000000;

inline bool is_anomalous_flow(std::uint64_t flow_id) {
    return flow_id >= kAnomalousFlowBase;
}

enum class EventType : std::uint8_t { send, receive, forward, drop };

const char* event_name(EventType t);

/// One trace line. send = packet generated at its source; forward = packet
/// arrived at an intermediate hop; receive = packet arrived at its final
/// destination; drop = packet discarded at a full egress queue.
/// origin_time is the packet's send time.
struct TraceRecord {
    EventType event = EventType::send;
    double time = 0.0;
    NodeId node = 0;
    std::uint64_t packet_id = 0;
    std::uint32_t size = 0; // bytes
    std::uint64_t flow_id = 0;
    double origin_time = 0.0;
};

/// Traces can run to tens of millions of records, so consumers subscribe a
/// sink instead of collecting vectors.
using TraceSink = std::function<void(const TraceRecord&)>;

struct Packet {
    std::uint64_t id = 0;
    std::uint64_t flow_id = 0;
    NodeId source = 0;
    NodeId destination = 0;
    std::uint32_t size = 0;
    double origin_time = 0.0;
    /// Scratch flag owned by observers; the engine clears it at creation
    /// and otherwise leaves it alone (threat tracking rides on it).
    bool marked = false;
};

struct SimHooks {
    /// Runs when a node begins transmitting a packet; may mutate the
    /// packet's marked flag.
    std::function<void(double, NodeId, Packet&)> on_transmit;
    /// Runs after each arrival was traced; final_hop tells receive from
    /// forward.
    std::function<void(double, NodeId, const Packet&, bool final_hop)> on_deliver;
};

/// Per-node observation counters, fed by receive and forward events.
struct NodeStats {
    std::uint64_t packets_seen = 0;
    std::uint64_t bytes_seen = 0;
    double mean_latency = 0.0; // running mean of event time - origin time

    void observe(double latency, std::uint32_t bytes) {
        ++packets_seen;
        bytes_seen += bytes;
        mean_latency += (latency - mean_latency) / static_cast<double>(packets_seen);
    }
};

using NodeStatsTable = std::vector<NodeStats>;

/// Mean arrival latency per node (+infinity where nothing was observed).
std::vector<double> average_arrival_time(const NodeStatsTable& stats);

struct SimCounters {
    std::uint64_t sends = 0;
    std::uint64_t receives = 0;
    std::uint64_t forwards = 0;
    std::uint64_t drops = 0;

    /// Packets generated but neither delivered nor dropped.
    std::uint64_t in_flight() const { return sends - receives - drops; }
};

struct SimParams {
    double sim_time = 900.0;
    double link_rate_bps = 1e6;
    double prop_delay = 5e-6;
    std::uint32_t queue_cap = 1000;
};

struct SimResult {
    NodeStatsTable stats;
    SimCounters counters;
    /// Packets still buffered or on the wire when time ran out; equals
    /// counters.in_flight() when every packet was accounted for.
    std::uint64_t live_packets_at_end = 0;
    std::uint32_t max_queue_occupancy = 0;
};

/// Event-driven store-and-forward network: one egress DropTail queue per
/// node (capacity counts the packet in transmission), per-hop delay =
/// size*8/link_rate + prop_delay, static minimum-hop routing. Events at
/// equal times fire in schedule order, which makes runs bit-reproducible.
class Simulator {
public:
    Simulator(const SimParams& params, const Topology& topo, const RoutingTable& routing);

    /// Registers a flow. Validates eagerly (ConfigError) so a bad flow is
    /// rejected before the run starts. May also be called from hooks while
    /// the simulation is running; generation then starts at
    /// max(flow.start, now).
    void add_flow(const Flow& flow);

    void set_trace_sink(TraceSink sink) { sink_ = std::move(sink); }
    void set_hooks(SimHooks hooks) { hooks_ = std::move(hooks); }
    SimHooks& hooks() { return hooks_; }

    double now() const { return now_; }
    const SimParams& params() const { return params_; }

    /// Processes every event strictly before sim_time. Runs once.
    SimResult run();

private:
    enum class EvKind : std::uint8_t { flow_gen, tx_done, arrival };

    struct Ev {
        double t;
        std::uint64_t seq;
        EvKind kind;
        std::uint32_t a; // flow index | node | node
        std::uint32_t b; // unused     | unused | packet slot
    };

    struct EvOrder {
        bool operator()(const Ev& x, const Ev& y) const {
            if (x.t != y.t) return x.t > y.t;
            return x.seq > y.seq;
        }
    };

    static constexpr std::uint32_t kNoPacket = ~std::uint32_t{0};

    void schedule(double t, EvKind kind, std::uint32_t a, std::uint32_t b);
    std::uint32_t alloc_packet();
    void free_packet(std::uint32_t slot);
    void emit(EventType ev, double t, NodeId node, const Packet& p);
    void enqueue(NodeId node, std::uint32_t slot, double t);
    void start_tx(NodeId node, double t);
    void handle_flow_gen(const Ev& ev);
    void handle_tx_done(const Ev& ev);
    void handle_arrival(const Ev& ev);

    SimParams params_;
    const Topology* topo_;
    const RoutingTable* routing_;
    std::vector<Flow> flows_;
    TraceSink sink_;
    SimHooks hooks_;

    std::priority_queue<Ev, std::vector<Ev>, EvOrder> events_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_packet_id_ = 0;
    std::vector<Packet> pool_;
    std::vector<std::uint32_t> free_slots_;
    std::vector<std::deque<std::uint32_t>> queues_; // egress, waiting only
    std::vector<std::uint32_t> in_service_;         // slot or kNoPacket
    SimResult result_;
    double now_ = 0.0;
    bool ran_ = false;
    std::uint64_t live_packets_ = 0;
};

/// One-call wrapper. Collects the full trace into trace_out when non-null;
/// pass a sink through `hooks`-style observers for big runs instead.
SimResult run_simulation(const SimParams& params, const Topology& topo,
                         const RoutingTable& routing, const std::vector<Flow>& flows,
                         std::vector<TraceRecord>* trace_out = nullptr,
                         SimHooks hooks = {});

// Trace CSV: event,time,node,packet_id,size,flow_id,origin_time with times
// fixed to 6 decimal places (microsecond resolution).
void write_trace_csv_header(std::ostream& out);
void write_trace_csv_record(std::ostream& out, const TraceRecord& rec);

/// Streams the observed communication graph out of a trace: every arrival
/// inside [t0, t1) is attributed to the link it crossed; edge weight =
/// arrivals per second, and topology edges that saw nothing get weight
/// epsilon so the result stays connected.
class CommGraphAccumulator {
public:
    CommGraphAccumulator(const Topology& topo, double t0, double t1, double epsilon = 1e-6);

    void observe(const TraceRecord& rec);
    WeightedGraph finish() const;

private:
    const Topology* topo_;
    double t0_, t1_, eps_;
    std::unordered_map<std::uint64_t, NodeId> holder_;        // in-flight packet -> last node
    std::unordered_map<std::uint64_t, std::uint64_t> counts_; // edge key -> arrivals
};

WeightedGraph observed_comm_graph(const std::vector<TraceRecord>& trace, const Topology& topo,
                                  double t0, double t1, double epsilon = 1e-6);

} // namespace netsentinel
