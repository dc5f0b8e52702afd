#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "netsentinel/graph.hpp"

namespace netsentinel {

enum class Measure {
    information_exact,
    information_pathsum,
    closeness,
    betweenness,
    eigenvector,
    degree,
};

const char* measure_name(Measure m);
Measure measure_from_name(const std::string& name); // ConfigError on unknown names

/// Scores for one measure plus the induced ranking: descending score, ties
/// broken by ascending node id.
struct CentralityReport {
    Measure measure = Measure::degree;
    std::vector<double> scores;
    std::vector<NodeId> ranking;
};

std::vector<NodeId> rank_by_score(const std::vector<double>& scores);

/// The top-fraction slice of a ranking. members is kept sorted ascending
/// so set queries and intersections are cheap.
struct CentralSet {
    std::vector<NodeId> members;
    double fraction = 0.0;

    bool contains(NodeId v) const;
    std::size_t size() const { return members.size(); }
};

/// Pairwise information measures from the shifted-Laplacian inverse
/// C = (L + J)^{-1} (J the all-ones matrix):
///
///   I_ij = 1 / (c_ii + c_jj - 2 c_ij)
///
/// The denominator is the effective resistance between i and j when edge
/// weights act as conductances. Diagonal entries are +infinity (a node
/// shares everything with itself). Requires a connected graph; throws
/// NumericalError if the solve is not trustworthy.
DenseMatrix information_measure_exact(const WeightedGraph& g);

/// Path-sum approximation: simple i-j paths act as parallel conductors,
/// each contributing 1/len(P). Exact whenever the simple paths are edge
/// disjoint (trees, single cycles). Exponential in graph size — intended
/// for small graphs and cross-validation. Throws NoPathError if no simple
/// path with at most max_hops edges connects i and j.
double information_measure_pathsum(const WeightedGraph& g, NodeId i, NodeId j,
                                   std::size_t max_hops);

/// Hop cap used by path-sum routines when the caller passes max_hops == 0.
std::size_t default_max_hops(NodeId n);

/// Information centrality: harmonic-style aggregate of the pairwise
/// information measures,
///
///   IC(i) = n / sum_{j != i} 1/I_ij
///
/// The self term contributes zero resistance. method selects how I_ij is
/// computed (information_exact or information_pathsum).
CentralityReport information_centrality(const WeightedGraph& g,
                                        Measure method = Measure::information_exact,
                                        std::size_t max_hops = 0);

/// 1 / sum of shortest-path distances to all other nodes.
CentralityReport closeness_centrality(const WeightedGraph& g);

/// Shortest-path betweenness (Brandes), weighted, endpoints excluded,
/// fractional credit across equal-length geodesics. Each unordered pair is
/// counted once.
CentralityReport betweenness_centrality(const WeightedGraph& g);

/// Principal eigenvector of the weighted adjacency matrix, normalized to
/// unit Euclidean norm, all entries positive. Power iteration on A + sigma I
/// (sigma = max weighted degree) so the dominant eigenvalue is strict even
/// on bipartite graphs. Throws ConvergenceError if max_iter is exhausted.
CentralityReport eigenvector_centrality(const WeightedGraph& g, double tol = 1e-12,
                                        std::size_t max_iter = 100000);

/// Weighted degree.
CentralityReport degree_centrality(const WeightedGraph& g);

/// Dispatch by measure with default knobs.
CentralityReport compute_centrality(const WeightedGraph& g, Measure m);

/// Top ceil(fraction * n) nodes of the ranking (at least one). fraction
/// must lie in (0, 1]. The ceiling is evaluated with a small backoff so
/// binary fractions of round counts (0.20 * 200) do not round up twice.
CentralSet select_central(const CentralityReport& report, double fraction);
CentralSet select_central(const std::vector<NodeId>& ranking, double fraction);

/// CSV: node,measure,score,rank  (rank 1 = most central; scores use enough
/// digits to round-trip).
void write_centrality_csv(const CentralityReport& report, std::ostream& out);

/// Rows only, for multi-measure files sharing one header.
void write_centrality_rows(const CentralityReport& report, std::ostream& out);

} // namespace netsentinel
