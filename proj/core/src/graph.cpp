#include "netsentinel/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

namespace netsentinel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void WeightedGraph::check_node(NodeId u) const {
    if (u >= n_) {
        throw ConfigError("node id " + std::to_string(u) + " out of range (n=" +
                          std::to_string(n_) + ")");
    }
}

void WeightedGraph::add_edge(NodeId u, NodeId v, double weight) {
    check_node(u);
    check_node(v);
    if (u == v) {
        throw ConfigError("self loop at node " + std::to_string(u));
    }
    if (!(weight > 0.0)) {
        throw ConfigError("edge weight must be strictly positive");
    }
    if (has_edge(u, v)) {
        throw ConfigError("duplicate edge {" + std::to_string(u) + "," +
                          std::to_string(v) + "}");
    }
    auto insert_sorted = [](std::vector<Neighbor>& lst, NodeId to, double w) {
        auto it = std::lower_bound(lst.begin(), lst.end(), to,
                                   [](const Neighbor& nb, NodeId id) { return nb.to < id; });
        lst.insert(it, Neighbor{to, w});
    };
    insert_sorted(adj_[u], v, weight);
    insert_sorted(adj_[v], u, weight);
    edges_.push_back(Edge{u, v, weight});
}

bool WeightedGraph::has_edge(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    const auto& lst = adj_[u];
    auto it = std::lower_bound(lst.begin(), lst.end(), v,
                               [](const Neighbor& nb, NodeId id) { return nb.to < id; });
    return it != lst.end() && it->to == v;
}

double WeightedGraph::edge_weight(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    const auto& lst = adj_[u];
    auto it = std::lower_bound(lst.begin(), lst.end(), v,
                               [](const Neighbor& nb, NodeId id) { return nb.to < id; });
    if (it == lst.end() || it->to != v) {
        throw ConfigError("no edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
    }
    return it->weight;
}

double WeightedGraph::weighted_degree(NodeId u) const {
    check_node(u);
    double sum = 0.0;
    for (const auto& nb : adj_[u]) sum += nb.weight;
    return sum;
}

double path_length(const WeightedGraph& g, const Path& p) {
    if (p.size() < 2) {
        throw InvalidPathError("a path has at least two vertices");
    }
    std::vector<char> seen(g.node_count(), 0);
    for (const NodeId v : p) {
        if (v >= g.node_count()) throw ConfigError("node id out of range in path");
        if (seen[v]) throw InvalidPathError("path repeats node " + std::to_string(v));
        seen[v] = 1;
    }
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (!g.has_edge(p[i], p[i + 1])) {
            throw InvalidPathError("vertices " + std::to_string(p[i]) + " and " +
                                   std::to_string(p[i + 1]) + " are not adjacent");
        }
        len += 1.0 / g.edge_weight(p[i], p[i + 1]);
    }
    return len;
}

std::vector<double> shortest_distances(const WeightedGraph& g, NodeId source) {
    const NodeId n = g.node_count();
    if (source >= n) throw ConfigError("source out of range");
    std::vector<double> dist(n, kInf);
    dist[source] = 0.0;
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue; // stale entry
        for (const auto& nb : g.neighbors(u)) {
            const double nd = d + 1.0 / nb.weight;
            if (nd < dist[nb.to]) {
                dist[nb.to] = nd;
                pq.emplace(nd, nb.to);
            }
        }
    }
    return dist;
}

double shortest_distance(const WeightedGraph& g, NodeId i, NodeId j) {
    if (i >= g.node_count() || j >= g.node_count()) throw ConfigError("node out of range");
    if (i == j) return 0.0;
    const auto dist = shortest_distances(g, i);
    if (dist[j] == kInf) {
        throw UnreachableError("node " + std::to_string(j) + " is unreachable from " +
                               std::to_string(i));
    }
    return dist[j];
}

namespace {

void dfs_paths(const WeightedGraph& g, NodeId cur, NodeId goal, std::size_t max_hops,
               Path& stack, std::vector<char>& on_stack, std::vector<Path>& out) {
    if (cur == goal) {
        out.push_back(stack);
        return;
    }
    if (stack.size() > max_hops) return; // stack holds hops+1 vertices
    for (const auto& nb : g.neighbors(cur)) {
        if (on_stack[nb.to]) continue;
        on_stack[nb.to] = 1;
        stack.push_back(nb.to);
        dfs_paths(g, nb.to, goal, max_hops, stack, on_stack, out);
        stack.pop_back();
        on_stack[nb.to] = 0;
    }
}

} // namespace

std::vector<Path> enumerate_simple_paths(const WeightedGraph& g, NodeId i, NodeId j,
                                         std::size_t max_hops) {
    if (i >= g.node_count() || j >= g.node_count()) throw ConfigError("node out of range");
    if (max_hops < 1) throw ConfigError("max_hops must be >= 1");
    std::vector<Path> out;
    if (i == j) return out;
    Path stack{i};
    std::vector<char> on_stack(g.node_count(), 0);
    on_stack[i] = 1;
    dfs_paths(g, i, j, max_hops, stack, on_stack, out);
    return out;
}

DenseMatrix laplacian(const WeightedGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    DenseMatrix L = DenseMatrix::Zero(n, n);
    for (const auto& e : g.edges()) {
        L(e.u, e.u) += e.weight;
        L(e.v, e.v) += e.weight;
        L(e.u, e.v) -= e.weight;
        L(e.v, e.u) -= e.weight;
    }
    return L;
}

bool is_connected(const WeightedGraph& g) {
    const NodeId n = g.node_count();
    if (n <= 1) return true;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> frontier{0};
    seen[0] = 1;
    NodeId visited = 1;
    while (!frontier.empty()) {
        const NodeId u = frontier.back();
        frontier.pop_back();
        for (const auto& nb : g.neighbors(u)) {
            if (!seen[nb.to]) {
                seen[nb.to] = 1;
                ++visited;
                frontier.push_back(nb.to);
            }
        }
    }
    return visited == n;
}

WeightedGraph read_graph(std::istream& in) {
    std::string line;
    bool have_header = false;
    WeightedGraph g(0);
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line.substr(first));
        std::string tag;
        ls >> tag;
        if (tag == "n") {
            if (have_header) throw FormatError("line " + std::to_string(lineno) +
                                               ": repeated node-count header");
            long long count = -1;
            if (!(ls >> count) || count < 0) {
                throw FormatError("line " + std::to_string(lineno) + ": bad node count");
            }
            g = WeightedGraph(static_cast<NodeId>(count));
            have_header = true;
        } else if (tag == "e") {
            if (!have_header) throw FormatError("line " + std::to_string(lineno) +
                                                ": edge before node-count header");
            long long u = -1, v = -1;
            double w = 0.0;
            if (!(ls >> u >> v >> w) || u < 0 || v < 0) {
                throw FormatError("line " + std::to_string(lineno) + ": bad edge line");
            }
            try {
                g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v), w);
            } catch (const ConfigError& e) {
                throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
            }
        } else {
            throw FormatError("line " + std::to_string(lineno) + ": unknown directive '" +
                              tag + "'");
        }
    }
    if (!have_header) throw FormatError("missing node-count header");
    return g;
}

WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    return read_graph(in);
}

void write_graph(const WeightedGraph& g, std::ostream& out) {
    out << "n " << g.node_count() << "\n";
    const auto prec = out.precision();
    out.precision(17);
    for (const auto& e : g.edges()) {
        out << "e " << e.u << " " << e.v << " " << e.weight << "\n";
    }
    out.precision(prec);
}

void save_graph(const WeightedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write graph file: " + path);
    write_graph(g, out);
    if (!out) throw IoError("error while writing graph file: " + path);
}

} // namespace netsentinel
