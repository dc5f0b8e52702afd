#include "netsentinel/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace netsentinel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CentralSet classify_central(ClassifyMethod method, const CentralityReport& ic_report,
                            const std::vector<double>& arrival_means, double fraction) {
    if (method == ClassifyMethod::ic) {
        return select_central(ic_report, fraction);
    }
    // ascending mean arrival latency; +inf (never observed) sinks to the end
    std::vector<NodeId> order(arrival_means.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (arrival_means[a] != arrival_means[b]) {
            return arrival_means[a] < arrival_means[b];
        }
        return a < b;
    });
    return select_central(order, fraction);
}

namespace {

// positions 1..n in sorted order; tied keys share the mean position
std::vector<double> midranks(const std::vector<double>& key, bool ascending) {
    const std::size_t n = key.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return ascending ? key[a] < key[b] : key[a] > key[b];
        return a < b;
    });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && key[order[j + 1]] == key[order[i]]) ++j;
        const double mid = static_cast<double>(i + j) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
        i = j + 1;
    }
    return rank;
}

} // namespace

double rank_agreement(const CentralityReport& ic_report,
                      const std::vector<double>& arrival_means, bool* degenerate) {
    if (ic_report.scores.size() != arrival_means.size()) {
        throw ConfigError("rank_agreement inputs cover different node sets");
    }
    if (degenerate) *degenerate = false;
    const std::size_t n = arrival_means.size();
    if (n < 2) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    const auto ric = midranks(ic_report.scores, /*ascending=*/false);
    const auto rat = midranks(arrival_means, /*ascending=*/true);
    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = ric[i] - mean;
        const double dy = rat[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> values) {
    if (values.empty()) throw ConfigError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

PooledAgreement pool_agreement(const std::vector<const ReplicationResult*>& reps,
                               double fraction, NodeId n) {
    if (reps.empty()) throw ConfigError("pool_agreement needs >= 1 replication");
    // Rank positions, not raw latencies, are what pooling must average: a
    // node one hop from a lucky source logs sub-millisecond latencies whose
    // packet weight would keep it spuriously "central" forever, but it holds
    // that rank in one replication only, while nodes the traffic reliably
    // reaches fast rank well in all of them.
    std::vector<double> arrival_rank_sum(n, 0.0);
    std::vector<double> ic_rank_sum(n, 0.0);
    for (const auto* r : reps) {
        if (!r->error.empty() || r->arrival_mean.size() != n ||
            r->ic_ranking.size() != n) {
            throw ConfigError("pool_agreement: replication without classification data");
        }
        // midranks so the (common) never-sampled +inf nodes tie instead of
        // being ordered by id; IC scores are effectively never tied, so the
        // stored strict ranking stands in for them
        const auto ar = midranks(r->arrival_mean, /*ascending=*/true);
        for (NodeId v = 0; v < n; ++v) {
            arrival_rank_sum[v] += ar[v];
            ic_rank_sum[r->ic_ranking[v]] += static_cast<double>(v);
        }
    }
    auto ascending_order = [n](const std::vector<double>& key) {
        std::vector<NodeId> order(n);
        std::iota(order.begin(), order.end(), NodeId{0});
        std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
            if (key[a] != key[b]) return key[a] < key[b];
            return a < b;
        });
        return order;
    };
    PooledAgreement out;
    out.fraction = fraction;
    out.ic_set = select_central(ascending_order(ic_rank_sum), fraction);
    out.arrival_set = select_central(ascending_order(arrival_rank_sum), fraction);
    std::vector<NodeId> common;
    std::set_intersection(out.ic_set.members.begin(), out.ic_set.members.end(),
                          out.arrival_set.members.begin(), out.arrival_set.members.end(),
                          std::back_inserter(common));
    out.overlap = static_cast<double>(common.size()) /
                  static_cast<double>(out.ic_set.members.size());
    return out;
}

namespace {

void run_one(const SimConfig& cfg, const Topology& topo, const RoutingTable& routing,
             double rate, std::uint32_t rep, std::vector<CentralityReport>* measure_out,
             ReplicationResult& res) {
    const std::uint64_t child_seed = cfg.rng_seed + rep;
    const std::uint64_t flow_seed = Rng::derive(child_seed, 1);
    const std::uint64_t dest_seed = Rng::derive(child_seed, 3);
    const NodeId n = cfg.n;

    std::vector<Flow> flows;
    flows.reserve(cfg.flow_count);
    Rng fr(flow_seed);
    for (std::uint32_t f = 0; f < cfg.flow_count; ++f) {
        Flow flow;
        flow.source = static_cast<NodeId>(fr.uniform_int(n));
        NodeId d = static_cast<NodeId>(fr.uniform_int(n - 1));
        if (d >= flow.source) ++d;
        flow.destination = d;
        flow.rate_bps = cfg.baseline_rate;
        flow.packet_size = cfg.packet_size;
        flow.flow_id = f;
        flow.stop = cfg.sim_time;
        flow.start = fr.uniform() * flow.gap(); // desynchronized CBR phases
        flows.push_back(flow);
    }

    InfectionState state(n);
    const AttackConfig attack = cfg.attack_config(rate);
    seed_attack(state, attack, child_seed);

    Simulator sim(cfg.sim_params(), topo, routing);
    for (const auto& f : flows) sim.add_flow(f);
    attach_attack(sim, state, attack, dest_seed);

    CommGraphAccumulator comm(topo, 0.0, cfg.t_train);
    IntervalSeries series(n, cfg.delta, cfg.sim_time);
    std::vector<std::uint64_t> arr_count(n, 0);
    std::vector<double> arr_mean(n, 0.0);
    const double t_train = cfg.t_train;
    sim.set_trace_sink([&](const TraceRecord& rec) {
        series.observe(rec);
        if (rec.time < t_train) {
            comm.observe(rec);
            if (rec.event == EventType::receive || rec.event == EventType::forward) {
                auto& c = arr_count[rec.node];
                ++c;
                arr_mean[rec.node] +=
                    ((rec.time - rec.origin_time) - arr_mean[rec.node]) /
                    static_cast<double>(c);
            }
        }
    });

    const SimResult sr = sim.run();
    res.counters = sr.counters;
    res.live_packets = sr.live_packets_at_end;
    res.max_queue_occupancy = sr.max_queue_occupancy;

    const WeightedGraph obs = comm.finish();
    const CentralityReport ic = information_centrality(obs, cfg.ic_method, cfg.max_hops);
    std::vector<double> arrival(n, kInf);
    for (NodeId v = 0; v < n; ++v) {
        if (arr_count[v] > 0) arrival[v] = arr_mean[v];
    }

    const Baseline base = fit_baseline(series, cfg.t_train, cfg.k);
    res.detection = detect(series, base);
    res.spearman = rank_agreement(ic, arrival, &res.spearman_degenerate);
    res.infection_times = state.times();
    res.arrival_mean = arrival;
    res.arrival_count = arr_count;
    res.ic_ranking = ic.ranking;

    for (const double frac : cfg.central_fractions) {
        CentralSet ci = classify_central(ClassifyMethod::ic, ic, arrival, frac);
        CentralSet ca = classify_central(ClassifyMethod::arrival_time, ic, arrival, frac);
        std::vector<NodeId> common;
        std::set_intersection(ci.members.begin(), ci.members.end(), ca.members.begin(),
                              ca.members.end(), std::back_inserter(common));
        res.overlap.push_back(static_cast<double>(common.size()) /
                              static_cast<double>(ci.members.size()));
        DetectionCurves curves =
            detection_curves(res.detection, ci, cfg.injection_time, cfg.delta, cfg.sim_time);
        res.final_central_fraction.push_back(curves.central.empty() ? 0.0
                                                                    : curves.central.back());
        res.final_noncentral_fraction.push_back(
            curves.noncentral.empty() ? -1.0 : curves.noncentral.back());
        std::vector<double> tc, tn;
        for (NodeId v = 0; v < n; ++v) {
            const auto& fd = res.detection.first_detection[v];
            (ci.contains(v) ? tc : tn).push_back(fd ? *fd : kInf);
        }
        res.median_detection_central.push_back(median(std::move(tc)));
        res.median_detection_noncentral.push_back(tn.empty() ? -1.0
                                                             : median(std::move(tn)));
        res.central_ic.push_back(std::move(ci));
        res.central_arrival.push_back(std::move(ca));
        res.curves.push_back(std::move(curves));
    }

    if (measure_out) {
        measure_out->push_back(ic);
        // comparison measures for the emitted centrality table; any one
        // failing (e.g. convergence) is skipped rather than killing the run
        for (const Measure m : {Measure::closeness, Measure::betweenness,
                                Measure::eigenvector, Measure::degree}) {
            try {
                measure_out->push_back(compute_centrality(obs, m));
            } catch (const Error&) {
            }
        }
    }
}

} // namespace

ExperimentSummary run_experiment(const SimConfig& config, const ReplicationCallback& cb) {
    config.validate();
    ExperimentSummary summary;
    summary.config = config;
    const Topology topo =
        generate_topology(config.n, config.side, config.radio_range, config.rng_seed);
    const RoutingTable routing = build_routing(topo);
    summary.results.reserve(config.anomaly_rates.size() * config.replications);
    for (std::size_t ri = 0; ri < config.anomaly_rates.size(); ++ri) {
        for (std::uint32_t rep = 0; rep < config.replications; ++rep) {
            ReplicationResult res;
            res.replication = rep;
            res.anomaly_rate = config.anomaly_rates[ri];
            auto* measure_out =
                (ri == 0 && rep == 0) ? &summary.measure_reports : nullptr;
            try {
                run_one(config, topo, routing, config.anomaly_rates[ri], rep, measure_out,
                        res);
            } catch (const std::exception& e) {
                const std::string what = e.what();
                res = ReplicationResult{};
                res.replication = rep;
                res.anomaly_rate = config.anomaly_rates[ri];
                res.error = what;
            }
            if (cb) cb(res);
            summary.results.push_back(std::move(res));
        }
    }
    for (std::size_t ri = 0; ri < config.anomaly_rates.size(); ++ri) {
        std::vector<const ReplicationResult*> ok;
        for (std::uint32_t rep = 0; rep < config.replications; ++rep) {
            const auto& r = summary.results[ri * config.replications + rep];
            if (r.error.empty()) ok.push_back(&r);
        }
        if (ok.empty()) continue;
        for (const double frac : config.central_fractions) {
            PooledAgreement p = pool_agreement(ok, frac, config.n);
            p.anomaly_rate = config.anomaly_rates[ri];
            summary.pooled.push_back(std::move(p));
        }
    }
    return summary;
}

namespace {

std::string fmt10(double x) {
    if (x == -1.0) return "n/a"; // group-absent sentinel
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write: " + p.string());
    return out;
}

std::string combo_dir_name(double rate, double fraction) {
    return "rate_" + fmt10(rate) + "bps_frac_" + fmt10(fraction);
}

DetectionCurves median_of_curves(const std::vector<const DetectionCurves*>& curves) {
    DetectionCurves out;
    if (curves.empty()) return out;
    const std::size_t points = curves.front()->time.size();
    out.time = curves.front()->time;
    out.central.resize(points);
    const bool has_non = !curves.front()->noncentral.empty();
    if (has_non) out.noncentral.resize(points);
    std::vector<double> tmp;
    tmp.reserve(curves.size());
    for (std::size_t i = 0; i < points; ++i) {
        tmp.clear();
        for (const auto* c : curves) tmp.push_back(c->central[i]);
        out.central[i] = median(tmp);
        if (has_non) {
            tmp.clear();
            for (const auto* c : curves) tmp.push_back(c->noncentral[i]);
            out.noncentral[i] = median(tmp);
        }
    }
    return out;
}

} // namespace

void emit_outputs(const ExperimentSummary& summary, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const SimConfig& cfg = summary.config;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    {
        auto out = open_out(fs::path(out_dir) / "config.txt");
        write_config(cfg, out);
    }
    {
        auto out = open_out(fs::path(out_dir) / "centrality.csv");
        out << "node,measure,score,rank\n";
        for (const auto& rep : summary.measure_reports) {
            write_centrality_rows(rep, out);
        }
    }

    auto results_for = [&](double rate) {
        std::vector<const ReplicationResult*> out;
        for (const auto& r : summary.results) {
            if (r.anomaly_rate == rate) out.push_back(&r);
        }
        return out;
    };

    for (const double rate : cfg.anomaly_rates) {
        const auto rate_results = results_for(rate);
        for (std::size_t fi = 0; fi < cfg.central_fractions.size(); ++fi) {
            const fs::path dir =
                fs::path(out_dir) / combo_dir_name(rate, cfg.central_fractions[fi]);
            fs::create_directories(dir, ec);
            if (ec) throw IoError("cannot create output directory: " + dir.string());
            std::vector<const DetectionCurves*> curve_ptrs;
            for (const auto* r : rate_results) {
                if (!r->error.empty()) continue;
                const std::string suffix = "_r" + std::to_string(r->replication) + ".csv";
                {
                    auto out = open_out(dir / ("curves" + suffix));
                    write_curves_csv(r->curves[fi], out);
                }
                {
                    auto out = open_out(dir / ("detections" + suffix));
                    write_detection_csv(r->detection, r->central_ic[fi], out);
                }
                {
                    auto out = open_out(dir / ("infections" + suffix));
                    InfectionState state(cfg.n);
                    for (NodeId v = 0; v < cfg.n; ++v) {
                        if (r->infection_times[v] < kInf) {
                            state.infect(v, r->infection_times[v]);
                        }
                    }
                    write_infection_csv(state, out);
                }
                curve_ptrs.push_back(&r->curves[fi]);
            }
            auto out = open_out(dir / "curves_median.csv");
            write_curves_csv(median_of_curves(curve_ptrs), out);
        }
    }

    {
        auto out = open_out(fs::path(out_dir) / "summary.txt");
        out << "experiment summary\n";
        out << "nodes " << cfg.n << "\n";
        out << "replications " << cfg.replications << "\n";
        out << "sim_time " << fmt10(cfg.sim_time) << "\n";
        out << "injection_time " << fmt10(cfg.injection_time) << "\n";
        for (const double rate : cfg.anomaly_rates) {
            const auto rate_results = results_for(rate);
            for (std::size_t fi = 0; fi < cfg.central_fractions.size(); ++fi) {
                std::vector<double> finals_c, finals_n, med_c, med_n, spearman, overlap;
                std::size_t failed = 0, degenerate = 0;
                for (const auto* r : rate_results) {
                    if (!r->error.empty()) {
                        ++failed;
                        continue;
                    }
                    finals_c.push_back(r->final_central_fraction[fi]);
                    if (r->final_noncentral_fraction[fi] >= 0.0) {
                        finals_n.push_back(r->final_noncentral_fraction[fi]);
                    }
                    med_c.push_back(r->median_detection_central[fi]);
                    if (r->median_detection_noncentral[fi] >= 0.0) {
                        med_n.push_back(r->median_detection_noncentral[fi]);
                    }
                    spearman.push_back(r->spearman);
                    overlap.push_back(r->overlap[fi]);
                    if (r->spearman_degenerate) ++degenerate;
                }
                out << "\ncombination rate=" << fmt10(rate)
                    << " fraction=" << fmt10(cfg.central_fractions[fi]) << "\n";
                out << "  replications_ok " << (rate_results.size() - failed) << "\n";
                out << "  replications_failed " << failed << "\n";
                if (!finals_c.empty()) {
                    out << "  median_final_central_fraction " << fmt10(median(finals_c))
                        << "\n";
                    out << "  median_final_noncentral_fraction "
                        << (finals_n.empty() ? "n/a" : fmt10(median(finals_n))) << "\n";
                    out << "  median_detection_time_central " << fmt10(median(med_c))
                        << "\n";
                    out << "  median_detection_time_noncentral "
                        << (med_n.empty() ? "n/a" : fmt10(median(med_n))) << "\n";
                    out << "  median_spearman " << fmt10(median(spearman)) << "\n";
                    out << "  spearman_degenerate_count " << degenerate << "\n";
                    out << "  median_overlap " << fmt10(median(overlap)) << "\n";
                }
                for (const auto& p : summary.pooled) {
                    if (p.anomaly_rate == rate &&
                        p.fraction == cfg.central_fractions[fi]) {
                        out << "  pooled_overlap " << fmt10(p.overlap) << "\n";
                    }
                }
            }
        }
        for (const auto& r : summary.results) {
            if (!r.error.empty()) {
                out << "\nfailed rate=" << fmt10(r.anomaly_rate) << " replication="
                    << r.replication << ": " << r.error << "\n";
            }
        }
    }
}

} // namespace netsentinel
