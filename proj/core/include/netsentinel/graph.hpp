#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netsentinel/errors.hpp"

namespace netsentinel {

using NodeId = std::uint32_t;

using DenseMatrix = Eigen::MatrixXd;

/// A path given as its vertex sequence (endpoints included).
using Path = std::vector<NodeId>;

struct Edge {
    NodeId u;
    NodeId v;
    double weight;
};

/// Undirected graph with strictly positive edge weights. Weights model
/// interaction frequency, so the traversal cost of an edge is 1/weight:
/// the more two nodes talk, the shorter the edge.
///
/// No self loops, no parallel edges. Adjacency lists are kept sorted by
/// neighbor id, which makes every traversal in the library deterministic.
class WeightedGraph {
public:
    explicit WeightedGraph(NodeId n) : n_(n), adj_(n) {}

    NodeId node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }

    /// Adds the undirected edge {u,v}. Throws ConfigError on self loops,
    /// out-of-range ids, duplicate edges or non-positive weights.
    void add_edge(NodeId u, NodeId v, double weight);

    bool has_edge(NodeId u, NodeId v) const;

    /// Weight of {u,v}; throws ConfigError if absent.
    double edge_weight(NodeId u, NodeId v) const;

    struct Neighbor {
        NodeId to;
        double weight;
    };

    const std::vector<Neighbor>& neighbors(NodeId u) const { return adj_[u]; }

    /// Edges in insertion order.
    const std::vector<Edge>& edges() const { return edges_; }

    /// Sum of incident edge weights.
    double weighted_degree(NodeId u) const;

private:
    void check_node(NodeId u) const;

    NodeId n_;
    std::vector<std::vector<Neighbor>> adj_;
    std::vector<Edge> edges_;
};

/// Weighted length of a path: sum of 1/weight over its edges. A path needs
/// at least two vertices; consecutive vertices must be adjacent, otherwise
/// InvalidPathError.
double path_length(const WeightedGraph& g, const Path& p);

/// Shortest-path distance between i and j under edge costs 1/weight.
/// d(i,i) == 0. Throws UnreachableError if j cannot be reached from i.
double shortest_distance(const WeightedGraph& g, NodeId i, NodeId j);

/// Single-source shortest distances (Dijkstra). Unreachable entries are
/// +infinity.
std::vector<double> shortest_distances(const WeightedGraph& g, NodeId source);

/// All simple i->j paths with at most max_hops edges, in lexicographic
/// order of their vertex sequences. i == j yields no paths (a path has at
/// least one edge and may not revisit its start). max_hops must be >= 1.
std::vector<Path> enumerate_simple_paths(const WeightedGraph& g, NodeId i, NodeId j,
                                         std::size_t max_hops);

/// Weighted Laplacian: L(i,i) = weighted degree of i, L(i,j) = -w_ij.
/// Every row sums to zero.
DenseMatrix laplacian(const WeightedGraph& g);

bool is_connected(const WeightedGraph& g);

// Plain-text graph file format, line oriented:
//   # comment (anywhere)
//   n <node_count>          -- exactly once, before any edge
//   e <i> <j> <weight>      -- one line per undirected edge
WeightedGraph read_graph(std::istream& in);
WeightedGraph load_graph(const std::string& path);
void write_graph(const WeightedGraph& g, std::ostream& out);
void save_graph(const WeightedGraph& g, const std::string& path);

} // namespace netsentinel
