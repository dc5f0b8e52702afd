#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "netsentinel/centrality.hpp"
#include "netsentinel/detector.hpp"
#include "netsentinel/sim.hpp"
#include "netsentinel/threat.hpp"

namespace netsentinel {

/// Full experiment parameterization. Field names double as the keys of the
/// flat key=value config file (ASCII spellings; `T_train` and the Greek
/// interval symbol are accepted as input aliases for t_train / delta).
struct SimConfig {
    NodeId n = 200;
    double side = 100.0;                 // meters, square area
    double radio_range = 12.5;           // meters
    double sim_time = 900.0;             // seconds
    std::uint32_t replications = 100;
    std::uint32_t flow_count = 35;       // simultaneous baseline flows
    double baseline_rate = 5e5;          // bits/second per flow
    std::uint32_t packet_size = 512;     // bytes, baseline flows
    std::uint32_t queue_cap = 1000;      // packets per egress queue
    double link_rate = 4e6;              // bits/second per link
    double prop_delay = 5e-6;            // seconds per hop
    double t_train = 80.0;               // training window [0, t_train)
    double delta = 1.0;                  // detector interval, seconds
    double k = 5.0;                      // detector threshold multiplier
    std::vector<double> central_fractions{0.15, 0.20};
    std::vector<double> anomaly_rates{10e6, 50e6}; // bits/second
    std::uint32_t t_seeds = 2;
    double injection_time = 100.0;
    std::uint64_t rng_seed = 1;
    std::uint32_t max_hops = 0;          // path-sum hop cap, 0 = default
    Measure ic_method = Measure::information_exact;
    std::uint32_t gibberish_packet_size = 4096; // bytes, anomaly flows

    /// ConfigError on any violated invariant.
    void validate() const;

    SimParams sim_params() const;
    AttackConfig attack_config(double anomaly_rate) const;
};

SimConfig parse_config(std::istream& in);
SimConfig load_config(const std::string& path);

/// Echoes a config as a parseable key=value file, keys in canonical order,
/// values with round-trip precision.
void write_config(const SimConfig& config, std::ostream& out);

enum class ClassifyMethod { ic, arrival_time };

/// ic ranks by descending information centrality; arrival_time ranks by
/// ascending training-window mean arrival latency (+infinity last, ties by
/// node id). Both take the top ceil(fraction*n).
CentralSet classify_central(ClassifyMethod method, const CentralityReport& ic_report,
                            const std::vector<double>& arrival_means, double fraction);

/// Spearman rank correlation (midranks for ties) between the IC ranking and
/// the ascending arrival-time ranking. When either side is constant the
/// correlation is undefined; 0 is returned and *degenerate set.
double rank_agreement(const CentralityReport& ic_report,
                      const std::vector<double>& arrival_means,
                      bool* degenerate = nullptr);

/// Everything retained from one replication at one anomaly rate. The
/// per-fraction vectors are index-aligned with config.central_fractions.
struct ReplicationResult {
    std::uint32_t replication = 0;
    double anomaly_rate = 0.0;
    std::string error; // nonempty = replication aborted, other fields empty

    SimCounters counters;
    /// Engine-side allocation count at sim end; conservation means
    /// counters.sends == counters.receives + counters.drops + live_packets.
    std::uint64_t live_packets = 0;
    std::uint32_t max_queue_occupancy = 0;
    double spearman = 0.0;
    bool spearman_degenerate = false;
    std::vector<double> infection_times; // +inf = never infected
    DetectionReport detection;

    std::vector<CentralSet> central_ic;
    std::vector<CentralSet> central_arrival;
    std::vector<double> overlap;                     // |ic ∩ arrival| / |set|
    std::vector<DetectionCurves> curves;             // IC-classified split
    std::vector<double> final_central_fraction;      // last curve sample
    std::vector<double> final_noncentral_fraction;   // -1 when no non-central nodes
    std::vector<double> median_detection_central;    // +inf when most never detect
    std::vector<double> median_detection_noncentral; // -1 when no non-central nodes

    // raw classification inputs, kept so classifications can be pooled
    // across replications
    std::vector<double> arrival_mean;         // per node; +inf = no samples
    std::vector<std::uint64_t> arrival_count; // training packets averaged
    std::vector<NodeId> ic_ranking;           // most central first
};

/// Classification agreement pooled over a whole run rather than judged one
/// replication at a time: the single set of sentinels the repeated runs
/// converge on. Both sides rank ascending mean per-replication rank position
/// (midranks on the arrival side, where never-sampled nodes tie at the end),
/// so one lucky low-latency replication cannot keep a node central.
struct PooledAgreement {
    double anomaly_rate = 0.0;
    double fraction = 0.0;
    double overlap = 0.0; // |ic_set ∩ arrival_set| / |ic_set|
    CentralSet ic_set;
    CentralSet arrival_set;
};

/// Pools the classification inputs of the given (successful) replications
/// into one PooledAgreement. Replications with errors must not be passed.
PooledAgreement pool_agreement(const std::vector<const ReplicationResult*>& reps,
                               double fraction, NodeId n);

struct ExperimentSummary {
    SimConfig config;
    /// Centrality on replication 0's observed training graph, one report
    /// per practical measure (path-sum excluded: exponential at this scale).
    std::vector<CentralityReport> measure_reports;
    /// Rate-major, replication-minor: results[r * replications + k].
    std::vector<ReplicationResult> results;
    /// Rate-major, fraction-minor; rates whose replications all failed are
    /// skipped.
    std::vector<PooledAgreement> pooled;
};

using ReplicationCallback = std::function<void(const ReplicationResult&)>;

/// One topology from rng_seed, shared by every replication; child seed for
/// replication k is rng_seed + k, reused across anomaly rates so rates are
/// compared on matched runs. A replication that throws is recorded with its
/// error and the experiment continues.
ExperimentSummary run_experiment(const SimConfig& config,
                                 const ReplicationCallback& on_replication = {});

/// Writes config.txt, centrality.csv, summary.txt, and one subdirectory per
/// (anomaly_rate, fraction) combination holding per-replication curves,
/// detections and infections CSVs plus the median curve. Deterministic byte
/// content for a given summary.
void emit_outputs(const ExperimentSummary& summary, const std::string& out_dir);

/// Median with the even-count average convention; +inf entries are legal.
double median(std::vector<double> values);

} // namespace netsentinel
