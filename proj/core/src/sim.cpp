#include "netsentinel/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace netsentinel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Topology generate_topology(NodeId n, double side, double radio_range, std::uint64_t seed) {
    if (n < 2) throw ConfigError("topology needs at least 2 nodes");
    if (!(side > 0.0)) throw ConfigError("area side must be positive");
    if (!(radio_range > 0.0)) throw ConfigError("radio range must be positive");
    Rng rng(seed);
    const double r2 = radio_range * radio_range;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Topology topo;
        topo.side = side;
        topo.radio_range = radio_range;
        topo.positions.resize(n);
        for (NodeId i = 0; i < n; ++i) {
            topo.positions[i].x = rng.uniform(0.0, side);
            topo.positions[i].y = rng.uniform(0.0, side);
        }
        topo.graph = WeightedGraph(n);
        for (NodeId i = 0; i < n; ++i) {
            for (NodeId j = i + 1; j < n; ++j) {
                const double dx = topo.positions[i].x - topo.positions[j].x;
                const double dy = topo.positions[i].y - topo.positions[j].y;
                if (dx * dx + dy * dy <= r2) topo.graph.add_edge(i, j, 1.0);
            }
        }
        if (is_connected(topo.graph)) return topo;
    }
    throw TopologyError("no connected placement found in 1000 attempts (n=" +
                        std::to_string(n) + ", side=" + std::to_string(side) +
                        ", range=" + std::to_string(radio_range) + ")");
}

RoutingTable RoutingTable::build(const Topology& topo) {
    const NodeId n = topo.node_count();
    RoutingTable rt;
    rt.n_ = n;
    rt.table_.assign(static_cast<std::size_t>(n) * n, 0);
    constexpr NodeId kUnset = ~NodeId{0};
    std::vector<NodeId> hop(n);
    std::vector<NodeId> bfs;
    bfs.reserve(n);
    for (NodeId d = 0; d < n; ++d) {
        std::fill(hop.begin(), hop.end(), kUnset);
        bfs.clear();
        bfs.push_back(d);
        hop[d] = 0;
        for (std::size_t head = 0; head < bfs.size(); ++head) {
            const NodeId u = bfs[head];
            for (const auto& nb : topo.graph.neighbors(u)) {
                if (hop[nb.to] == kUnset) {
                    hop[nb.to] = hop[u] + 1;
                    bfs.push_back(nb.to);
                }
            }
        }
        for (NodeId s = 0; s < n; ++s) {
            if (s == d) {
                rt.table_[static_cast<std::size_t>(s) * n + d] = d;
                continue;
            }
            if (hop[s] == kUnset) {
                throw NotConnectedError("routing requires a connected topology");
            }
            // neighbors are sorted by id, so the first one closer to d wins
            NodeId next = kUnset;
            for (const auto& nb : topo.graph.neighbors(s)) {
                if (hop[nb.to] == hop[s] - 1) {
                    next = nb.to;
                    break;
                }
            }
            rt.table_[static_cast<std::size_t>(s) * n + d] = next;
        }
    }
    return rt;
}

RoutingTable build_routing(const Topology& topo) { return RoutingTable::build(topo); }

NodeId RoutingTable::next_hop(NodeId from, NodeId dest) const {
    if (from >= n_ || dest >= n_) throw ConfigError("node out of range");
    return table_[static_cast<std::size_t>(from) * n_ + dest];
}

std::vector<NodeId> RoutingTable::route(NodeId from, NodeId dest) const {
    std::vector<NodeId> path{from};
    NodeId cur = from;
    while (cur != dest) {
        cur = next_hop(cur, dest);
        path.push_back(cur);
        if (path.size() > n_) throw Error("routing loop"); // cannot happen on valid tables
    }
    return path;
}

const char* event_name(EventType t) {
    switch (t) {
        case EventType::send: return "send";
        case EventType::receive: return "receive";
        case EventType::forward: return "forward";
        case EventType::drop: return "drop";
    }
    return "?";
}

std::vector<double> average_arrival_time(const NodeStatsTable& stats) {
    std::vector<double> out(stats.size(), kInf);
    for (std::size_t i = 0; i < stats.size(); ++i) {
        if (stats[i].packets_seen > 0) out[i] = stats[i].mean_latency;
    }
    return out;
}

Simulator::Simulator(const SimParams& params, const Topology& topo, const RoutingTable& routing)
    : params_(params), topo_(&topo), routing_(&routing) {
    if (!(params.sim_time > 0.0)) throw ConfigError("sim_time must be positive");
    if (!(params.link_rate_bps > 0.0)) throw ConfigError("link rate must be positive");
    if (params.prop_delay < 0.0) throw ConfigError("propagation delay must be >= 0");
    if (params.queue_cap < 1) throw ConfigError("queue capacity must be >= 1");
    if (routing.node_count() != topo.node_count()) {
        throw ConfigError("routing table does not match topology");
    }
    const NodeId n = topo.node_count();
    queues_.resize(n);
    in_service_.assign(n, kNoPacket);
    result_.stats.resize(n);
}

void Simulator::add_flow(const Flow& flow) {
    const NodeId n = topo_->node_count();
    if (flow.source >= n || flow.destination >= n) {
        throw ConfigError("flow endpoint out of range");
    }
    if (flow.source == flow.destination) {
        throw ConfigError("flow source equals destination");
    }
    if (!(flow.rate_bps > 0.0)) throw ConfigError("flow rate must be positive");
    if (flow.packet_size == 0) throw ConfigError("flow packet size must be positive");
    if (flow.start < 0.0 || !(flow.stop > flow.start)) {
        throw ConfigError("flow needs 0 <= start < stop");
    }
    const auto index = static_cast<std::uint32_t>(flows_.size());
    flows_.push_back(flow);
    schedule(std::max(flow.start, now_), EvKind::flow_gen, index, 0);
}

void Simulator::schedule(double t, EvKind kind, std::uint32_t a, std::uint32_t b) {
    events_.push(Ev{t, next_seq_++, kind, a, b});
}

std::uint32_t Simulator::alloc_packet() {
    if (!free_slots_.empty()) {
        const auto slot = free_slots_.back();
        free_slots_.pop_back();
        return slot;
    }
    pool_.emplace_back();
    return static_cast<std::uint32_t>(pool_.size() - 1);
}

void Simulator::free_packet(std::uint32_t slot) { free_slots_.push_back(slot); }

void Simulator::emit(EventType ev, double t, NodeId node, const Packet& p) {
    if (sink_) {
        sink_(TraceRecord{ev, t, node, p.id, p.size, p.flow_id, p.origin_time});
    }
}

void Simulator::enqueue(NodeId node, std::uint32_t slot, double t) {
    const auto waiting = static_cast<std::uint32_t>(queues_[node].size());
    const std::uint32_t occupancy = waiting + (in_service_[node] != kNoPacket ? 1u : 0u);
    if (occupancy >= params_.queue_cap) {
        result_.counters.drops++;
        emit(EventType::drop, t, node, pool_[slot]);
        --live_packets_;
        free_packet(slot);
        return;
    }
    queues_[node].push_back(slot);
    result_.max_queue_occupancy = std::max(result_.max_queue_occupancy, occupancy + 1);
    if (in_service_[node] == kNoPacket) start_tx(node, t);
}

void Simulator::start_tx(NodeId node, double t) {
    const std::uint32_t slot = queues_[node].front();
    queues_[node].pop_front();
    in_service_[node] = slot;
    if (hooks_.on_transmit) hooks_.on_transmit(t, node, pool_[slot]);
    const double tx = pool_[slot].size * 8.0 / params_.link_rate_bps;
    schedule(t + tx, EvKind::tx_done, node, slot);
}

void Simulator::handle_flow_gen(const Ev& ev) {
    // by value: hooks may add_flow() below us and reallocate flows_
    const Flow f = flows_[ev.a];
    const std::uint32_t slot = alloc_packet();
    pool_[slot] = Packet{next_packet_id_++, f.flow_id, f.source, f.destination,
                         f.packet_size, ev.t, false};
    ++live_packets_;
    result_.counters.sends++;
    emit(EventType::send, ev.t, f.source, pool_[slot]);
    enqueue(f.source, slot, ev.t);
    const double tn = ev.t + f.gap();
    if (tn < f.stop) schedule(tn, EvKind::flow_gen, ev.a, 0);
}

void Simulator::handle_tx_done(const Ev& ev) {
    const NodeId node = ev.a;
    const std::uint32_t slot = ev.b;
    in_service_[node] = kNoPacket;
    const NodeId next = routing_->next_hop(node, pool_[slot].destination);
    schedule(ev.t + params_.prop_delay, EvKind::arrival, next, slot);
    if (!queues_[node].empty()) start_tx(node, ev.t);
}

void Simulator::handle_arrival(const Ev& ev) {
    const NodeId node = ev.a;
    const std::uint32_t slot = ev.b;
    const Packet& p = pool_[slot];
    if (node == p.destination) {
        result_.counters.receives++;
        emit(EventType::receive, ev.t, node, p);
        result_.stats[node].observe(ev.t - p.origin_time, p.size);
        if (hooks_.on_deliver) hooks_.on_deliver(ev.t, node, p, true);
        --live_packets_;
        free_packet(slot);
    } else {
        result_.counters.forwards++;
        emit(EventType::forward, ev.t, node, p);
        result_.stats[node].observe(ev.t - p.origin_time, p.size);
        if (hooks_.on_deliver) hooks_.on_deliver(ev.t, node, p, false);
        enqueue(node, slot, ev.t);
    }
}

SimResult Simulator::run() {
    if (ran_) throw Error("Simulator::run() may only be called once");
    ran_ = true;
    while (!events_.empty() && events_.top().t < params_.sim_time) {
        const Ev ev = events_.top();
        events_.pop();
        now_ = ev.t;
        switch (ev.kind) {
            case EvKind::flow_gen: handle_flow_gen(ev); break;
            case EvKind::tx_done: handle_tx_done(ev); break;
            case EvKind::arrival: handle_arrival(ev); break;
        }
    }
    now_ = params_.sim_time;
    result_.live_packets_at_end = live_packets_;
    return result_;
}

SimResult run_simulation(const SimParams& params, const Topology& topo,
                         const RoutingTable& routing, const std::vector<Flow>& flows,
                         std::vector<TraceRecord>* trace_out, SimHooks hooks) {
    Simulator sim(params, topo, routing);
    if (trace_out) {
        sim.set_trace_sink([trace_out](const TraceRecord& rec) { trace_out->push_back(rec); });
    }
    sim.set_hooks(std::move(hooks));
    for (const auto& f : flows) sim.add_flow(f);
    return sim.run();
}

void write_trace_csv_header(std::ostream& out) {
    out << "event,time,node,packet_id,size,flow_id,origin_time\n";
}

void write_trace_csv_record(std::ostream& out, const TraceRecord& rec) {
    char buf[160];
    const int len = std::snprintf(buf, sizeof buf, "%s,%.6f,%u,%llu,%u,%llu,%.6f\n",
                                  event_name(rec.event), rec.time, rec.node,
                                  static_cast<unsigned long long>(rec.packet_id), rec.size,
                                  static_cast<unsigned long long>(rec.flow_id),
                                  rec.origin_time);
    out.write(buf, len);
}

CommGraphAccumulator::CommGraphAccumulator(const Topology& topo, double t0, double t1,
                                           double epsilon)
    : topo_(&topo), t0_(t0), t1_(t1), eps_(epsilon) {
    if (!(t1 > t0)) throw ConfigError("observation window must have positive length");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

void CommGraphAccumulator::observe(const TraceRecord& rec) {
    const auto n = static_cast<std::uint64_t>(topo_->node_count());
    switch (rec.event) {
        case EventType::send:
            holder_[rec.packet_id] = rec.node;
            break;
        case EventType::forward:
        case EventType::receive: {
            auto it = holder_.find(rec.packet_id);
            if (it != holder_.end()) {
                if (rec.time >= t0_ && rec.time < t1_) {
                    const NodeId a = std::min(it->second, rec.node);
                    const NodeId b = std::max(it->second, rec.node);
                    counts_[a * n + b]++;
                }
                if (rec.event == EventType::forward) {
                    it->second = rec.node;
                } else {
                    holder_.erase(it);
                }
            }
            break;
        }
        case EventType::drop:
            holder_.erase(rec.packet_id);
            break;
    }
}

WeightedGraph CommGraphAccumulator::finish() const {
    const NodeId n = topo_->node_count();
    const double duration = t1_ - t0_;
    WeightedGraph g(n);
    for (const auto& e : topo_->graph.edges()) {
        const NodeId a = std::min(e.u, e.v);
        const NodeId b = std::max(e.u, e.v);
        const auto it = counts_.find(static_cast<std::uint64_t>(a) * n + b);
        const double rate = it == counts_.end()
                                ? 0.0
                                : static_cast<double>(it->second) / duration;
        g.add_edge(e.u, e.v, std::max(rate, eps_));
    }
    return g;
}

WeightedGraph observed_comm_graph(const std::vector<TraceRecord>& trace, const Topology& topo,
                                  double t0, double t1, double epsilon) {
    CommGraphAccumulator acc(topo, t0, t1, epsilon);
    for (const auto& rec : trace) acc.observe(rec);
    return acc.finish();
}

} // namespace netsentinel
