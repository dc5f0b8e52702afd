#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "netsentinel/centrality.hpp"
#include "netsentinel/sim.hpp"

namespace netsentinel {

/// Per-node byte volume over fixed-length intervals: at(v, m) is the number
/// of bytes v received or forwarded during [m*delta, (m+1)*delta). Feed it
/// trace records as they are emitted; send and drop records are ignored
/// (a node observes traffic that actually reaches it).
class IntervalSeries {
public:
    IntervalSeries(NodeId n, double delta, double horizon);

    void observe(const TraceRecord& rec);

    NodeId node_count() const { return static_cast<NodeId>(bytes_.size()); }
    double delta() const { return delta_; }
    std::size_t interval_count() const { return intervals_; }
    std::uint64_t at(NodeId v, std::size_t m) const { return bytes_[v][m]; }
    const std::vector<std::uint64_t>& row(NodeId v) const { return bytes_[v]; }

private:
    double delta_;
    std::size_t intervals_;
    std::vector<std::vector<std::uint64_t>> bytes_;
};

IntervalSeries aggregate_intervals(const std::vector<TraceRecord>& trace, NodeId n,
                                   double delta, double horizon);

/// Training statistics and the alarm threshold per node:
///
///   threshold = max(mean + k*stddev, 1.5*mean + 1)
///
/// Population stddev over the training intervals. The second operand keeps
/// the threshold meaningful when training traffic is perfectly regular
/// (stddev == 0) or absent (mean == 0).
struct Baseline {
    std::size_t training_intervals = 0;
    double k = 5.0;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<double> threshold;
};

/// Fits per-node baselines from every interval that lies entirely inside
/// [0, t_train). Requires at least 10 such intervals.
Baseline fit_baseline(const IntervalSeries& series, double t_train, double k);

/// first_detection[v] = start time of the earliest post-training interval
/// whose volume exceeds v's threshold; nullopt if none does.
struct DetectionReport {
    std::vector<std::optional<double>> first_detection;
};

DetectionReport detect(const IntervalSeries& series, const Baseline& baseline);

/// Cumulative detection fractions, sampled at interval ends from the first
/// interval boundary after injection_time. noncentral stays empty when the
/// central set covers every node.
struct DetectionCurves {
    std::vector<double> time;
    std::vector<double> central;
    std::vector<double> noncentral;
};

DetectionCurves detection_curves(const DetectionReport& report, const CentralSet& central,
                                 double injection_time, double delta, double horizon);

/// CSV: node,is_central,first_detection_time (empty cell when undetected).
void write_detection_csv(const DetectionReport& report, const CentralSet& central,
                         std::ostream& out);

/// CSV: time,central_fraction,noncentral_fraction (the latter column empty
/// when there are no non-central nodes).
void write_curves_csv(const DetectionCurves& curves, std::ostream& out);

} // namespace netsentinel
