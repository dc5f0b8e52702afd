#include "netsentinel/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

namespace netsentinel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* measure_name(Measure m) {
    switch (m) {
        case Measure::information_exact: return "information_exact";
        case Measure::information_pathsum: return "information_pathsum";
        case Measure::closeness: return "closeness";
        case Measure::betweenness: return "betweenness";
        case Measure::eigenvector: return "eigenvector";
        case Measure::degree: return "degree";
    }
    return "?";
}

Measure measure_from_name(const std::string& name) {
    for (Measure m : {Measure::information_exact, Measure::information_pathsum,
                      Measure::closeness, Measure::betweenness, Measure::eigenvector,
                      Measure::degree}) {
        if (name == measure_name(m)) return m;
    }
    throw ConfigError("unknown centrality measure: " + name);
}

std::vector<NodeId> rank_by_score(const std::vector<double>& scores) {
    std::vector<NodeId> order(scores.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

bool CentralSet::contains(NodeId v) const {
    return std::binary_search(members.begin(), members.end(), v);
}

std::size_t default_max_hops(NodeId n) {
    return std::min<std::size_t>(n >= 1 ? n - 1 : 0, 8);
}

DenseMatrix information_measure_exact(const WeightedGraph& g) {
    if (!is_connected(g)) {
        throw NotConnectedError("information measure requires a connected graph");
    }
    const auto n = static_cast<Eigen::Index>(g.node_count());
    DenseMatrix I(n, n);
    if (n == 1) {
        I(0, 0) = kInf;
        return I;
    }
    DenseMatrix M = laplacian(g);
    M.array() += 1.0; // L + J; the rank-one shift removes the null space
    Eigen::PartialPivLU<DenseMatrix> lu(M);
    DenseMatrix C = lu.solve(DenseMatrix::Identity(n, n));
    const double resid = (M * C - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    const double scale = 1.0 + M.cwiseAbs().maxCoeff() * C.cwiseAbs().maxCoeff();
    if (!std::isfinite(resid) || resid / scale > 1e-9) {
        throw NumericalError("shifted-Laplacian solve is not trustworthy (residual " +
                             std::to_string(resid) + ")");
    }
    C = ((C + C.transpose()) * 0.5).eval(); // restore exact symmetry
    for (Eigen::Index i = 0; i < n; ++i) {
        I(i, i) = kInf;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r = C(i, i) + C(j, j) - 2.0 * C(i, j);
            if (!(r > 0.0)) {
                throw NumericalError("non-positive effective resistance between nodes " +
                                     std::to_string(i) + " and " + std::to_string(j));
            }
            I(i, j) = I(j, i) = 1.0 / r;
        }
    }
    return I;
}

double information_measure_pathsum(const WeightedGraph& g, NodeId i, NodeId j,
                                   std::size_t max_hops) {
    if (i == j) return kInf;
    if (max_hops == 0) max_hops = default_max_hops(g.node_count());
    const auto paths = enumerate_simple_paths(g, i, j, max_hops);
    if (paths.empty()) {
        throw NoPathError("no simple path from " + std::to_string(i) + " to " +
                          std::to_string(j) + " within " + std::to_string(max_hops) +
                          " hops");
    }
    double conductance = 0.0;
    for (const auto& p : paths) conductance += 1.0 / path_length(g, p);
    return conductance;
}

CentralityReport information_centrality(const WeightedGraph& g, Measure method,
                                        std::size_t max_hops) {
    const NodeId n = g.node_count();
    CentralityReport rep;
    rep.measure = method;
    rep.scores.assign(n, 0.0);
    if (n == 0) return rep;
    if (n == 1) {
        rep.scores[0] = kInf;
        rep.ranking = {0};
        return rep;
    }
    if (method == Measure::information_exact) {
        if (!is_connected(g)) {
            throw NotConnectedError("information centrality requires a connected graph");
        }
        DenseMatrix M = laplacian(g);
        M.array() += 1.0;
        Eigen::PartialPivLU<DenseMatrix> lu(M);
        DenseMatrix C = lu.solve(DenseMatrix::Identity(n, n));
        const double resid = (M * C - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
        const double scale = 1.0 + M.cwiseAbs().maxCoeff() * C.cwiseAbs().maxCoeff();
        if (!std::isfinite(resid) || resid / scale > 1e-9) {
            throw NumericalError("shifted-Laplacian solve is not trustworthy");
        }
        C = ((C + C.transpose()) * 0.5).eval();
        // sum_j R_ij = n*c_ii + tr(C) - 2 * rowsum_i(C); the j == i term is zero.
        const double trace = C.trace();
        const Eigen::VectorXd rowsum = C.rowwise().sum();
        for (NodeId i = 0; i < n; ++i) {
            const double rsum = n * C(i, i) + trace - 2.0 * rowsum(i);
            if (!(rsum > 0.0)) throw NumericalError("non-positive resistance sum");
            rep.scores[i] = static_cast<double>(n) / rsum;
        }
    } else if (method == Measure::information_pathsum) {
        if (!is_connected(g)) {
            throw NotConnectedError("information centrality requires a connected graph");
        }
        if (max_hops == 0) max_hops = default_max_hops(n);
        std::vector<double> rsum(n, 0.0);
        for (NodeId i = 0; i < n; ++i) {
            for (NodeId j = i + 1; j < n; ++j) {
                const double info = information_measure_pathsum(g, i, j, max_hops);
                rsum[i] += 1.0 / info;
                rsum[j] += 1.0 / info;
            }
        }
        for (NodeId i = 0; i < n; ++i) {
            rep.scores[i] = static_cast<double>(n) / rsum[i];
        }
    } else {
        throw ConfigError("information_centrality: method must be an information measure");
    }
    rep.ranking = rank_by_score(rep.scores);
    return rep;
}

CentralityReport closeness_centrality(const WeightedGraph& g) {
    if (!is_connected(g)) {
        throw NotConnectedError("closeness centrality requires a connected graph");
    }
    const NodeId n = g.node_count();
    CentralityReport rep;
    rep.measure = Measure::closeness;
    rep.scores.assign(n, 0.0);
    if (n == 1) {
        rep.scores[0] = kInf;
    } else {
        for (NodeId i = 0; i < n; ++i) {
            const auto dist = shortest_distances(g, i);
            double sum = 0.0;
            for (NodeId j = 0; j < n; ++j) sum += dist[j];
            rep.scores[i] = 1.0 / sum;
        }
    }
    rep.ranking = rank_by_score(rep.scores);
    return rep;
}

CentralityReport betweenness_centrality(const WeightedGraph& g) {
    const NodeId n = g.node_count();
    CentralityReport rep;
    rep.measure = Measure::betweenness;
    rep.scores.assign(n, 0.0);
    // Brandes with Dijkstra; geodesic ties compare with a small absolute
    // tolerance (exact in unit-weight graphs, where tied sums are identical).
    constexpr double tie_tol = 1e-12;
    std::vector<double> dist(n), sigma(n), delta(n);
    std::vector<std::vector<NodeId>> preds(n);
    std::vector<char> settled(n);
    std::vector<NodeId> order;
    order.reserve(n);
    using Item = std::pair<double, NodeId>;
    for (NodeId s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(settled.begin(), settled.end(), 0);
        for (auto& p : preds) p.clear();
        order.clear();
        dist[s] = 0.0;
        sigma[s] = 1.0;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            const auto [d, u] = pq.top();
            pq.pop();
            if (settled[u]) continue;
            settled[u] = 1;
            order.push_back(u);
            for (const auto& nb : g.neighbors(u)) {
                if (settled[nb.to]) continue;
                const double nd = d + 1.0 / nb.weight;
                if (nd < dist[nb.to] - tie_tol) {
                    dist[nb.to] = nd;
                    sigma[nb.to] = sigma[u];
                    preds[nb.to].assign(1, u);
                    pq.emplace(nd, nb.to);
                } else if (std::abs(nd - dist[nb.to]) <= tie_tol) {
                    sigma[nb.to] += sigma[u];
                    preds[nb.to].push_back(u);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeId w = *it;
            for (const NodeId v : preds[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) rep.scores[w] += delta[w];
        }
    }
    // each unordered pair was visited from both endpoints
    for (auto& x : rep.scores) x *= 0.5;
    rep.ranking = rank_by_score(rep.scores);
    return rep;
}

CentralityReport eigenvector_centrality(const WeightedGraph& g, double tol,
                                        std::size_t max_iter) {
    if (!is_connected(g)) {
        throw NotConnectedError("eigenvector centrality requires a connected graph");
    }
    const NodeId n = g.node_count();
    CentralityReport rep;
    rep.measure = Measure::eigenvector;
    if (n == 1) {
        rep.scores = {1.0};
        rep.ranking = {0};
        return rep;
    }
    double shift = 0.0;
    for (NodeId i = 0; i < n; ++i) shift = std::max(shift, g.weighted_degree(i));
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (NodeId i = 0; i < n; ++i) {
            double acc = shift * x[i];
            for (const auto& nb : g.neighbors(i)) acc += nb.weight * x[nb.to];
            y[i] = acc;
        }
        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) throw NumericalError("eigenvector iteration collapsed to zero");
        double diff = 0.0;
        for (NodeId i = 0; i < n; ++i) {
            y[i] /= norm;
            diff = std::max(diff, std::abs(y[i] - x[i]));
        }
        x.swap(y);
        if (diff < tol) {
            rep.scores = std::move(x);
            rep.ranking = rank_by_score(rep.scores);
            return rep;
        }
    }
    throw ConvergenceError("eigenvector centrality did not converge in " +
                           std::to_string(max_iter) + " iterations");
}

CentralityReport degree_centrality(const WeightedGraph& g) {
    const NodeId n = g.node_count();
    CentralityReport rep;
    rep.measure = Measure::degree;
    rep.scores.resize(n);
    for (NodeId i = 0; i < n; ++i) rep.scores[i] = g.weighted_degree(i);
    rep.ranking = rank_by_score(rep.scores);
    return rep;
}

CentralityReport compute_centrality(const WeightedGraph& g, Measure m) {
    switch (m) {
        case Measure::information_exact:
        case Measure::information_pathsum:
            return information_centrality(g, m);
        case Measure::closeness: return closeness_centrality(g);
        case Measure::betweenness: return betweenness_centrality(g);
        case Measure::eigenvector: return eigenvector_centrality(g);
        case Measure::degree: return degree_centrality(g);
    }
    throw ConfigError("unknown measure");
}

CentralSet select_central(const std::vector<NodeId>& ranking, double fraction) {
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw ConfigError("central fraction must lie in (0, 1]");
    }
    const std::size_t n = ranking.size();
    if (n == 0) throw ConfigError("cannot select from an empty ranking");
    // the 1e-9 backoff keeps ceil from rounding up on binary fraction noise
    auto k = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    CentralSet set;
    set.fraction = fraction;
    set.members.assign(ranking.begin(), ranking.begin() + k);
    std::sort(set.members.begin(), set.members.end());
    return set;
}

CentralSet select_central(const CentralityReport& report, double fraction) {
    return select_central(report.ranking, fraction);
}

void write_centrality_rows(const CentralityReport& report, std::ostream& out) {
    const std::size_t n = report.scores.size();
    std::vector<std::size_t> rank_of(n, 0);
    for (std::size_t r = 0; r < report.ranking.size(); ++r) {
        rank_of[report.ranking[r]] = r + 1;
    }
    std::ostringstream num;
    num.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
        num.str("");
        num << report.scores[i];
        out << i << ',' << measure_name(report.measure) << ',' << num.str() << ','
            << rank_of[i] << '\n';
    }
}

void write_centrality_csv(const CentralityReport& report, std::ostream& out) {
    out << "node,measure,score,rank\n";
    write_centrality_rows(report, out);
}

} // namespace netsentinel
