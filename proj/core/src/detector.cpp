#include "netsentinel/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace netsentinel {

IntervalSeries::IntervalSeries(NodeId n, double delta, double horizon) : delta_(delta) {
    if (n == 0) throw ConfigError("interval series needs at least one node");
    if (!(delta > 0.0)) throw ConfigError("interval length must be positive");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    intervals_ = static_cast<std::size_t>(std::ceil(horizon / delta - 1e-9));
    if (intervals_ == 0) intervals_ = 1;
    bytes_.assign(n, std::vector<std::uint64_t>(intervals_, 0));
}

void IntervalSeries::observe(const TraceRecord& rec) {
    if (rec.event != EventType::receive && rec.event != EventType::forward) return;
    if (rec.time < 0.0) return;
    const auto m = static_cast<std::size_t>(rec.time / delta_);
    if (m < intervals_ && rec.node < bytes_.size()) {
        bytes_[rec.node][m] += rec.size;
    }
}

IntervalSeries aggregate_intervals(const std::vector<TraceRecord>& trace, NodeId n,
                                   double delta, double horizon) {
    IntervalSeries series(n, delta, horizon);
    for (const auto& rec : trace) series.observe(rec);
    return series;
}

Baseline fit_baseline(const IntervalSeries& series, double t_train, double k) {
    if (!(k > 0.0)) throw ConfigError("detector k must be positive");
    if (!(t_train > 0.0)) throw ConfigError("training window must be positive");
    // intervals entirely inside [0, t_train)
    auto train = static_cast<std::size_t>(std::floor(t_train / series.delta() + 1e-9));
    train = std::min(train, series.interval_count());
    if (train < 10) {
        throw ConfigError("training window holds fewer than 10 intervals");
    }
    const NodeId n = series.node_count();
    Baseline base;
    base.training_intervals = train;
    base.k = k;
    base.mean.resize(n);
    base.stddev.resize(n);
    base.threshold.resize(n);
    for (NodeId v = 0; v < n; ++v) {
        const auto& row = series.row(v);
        double mean = 0.0;
        for (std::size_t m = 0; m < train; ++m) mean += static_cast<double>(row[m]);
        mean /= static_cast<double>(train);
        double var = 0.0;
        for (std::size_t m = 0; m < train; ++m) {
            const double d = static_cast<double>(row[m]) - mean;
            var += d * d;
        }
        var /= static_cast<double>(train); // population variance
        base.mean[v] = mean;
        base.stddev[v] = std::sqrt(var);
        base.threshold[v] = std::max(mean + k * base.stddev[v], 1.5 * mean + 1.0);
    }
    return base;
}

DetectionReport detect(const IntervalSeries& series, const Baseline& baseline) {
    if (baseline.mean.size() != series.node_count()) {
        throw ConfigError("baseline does not match series");
    }
    const NodeId n = series.node_count();
    DetectionReport report;
    report.first_detection.assign(n, std::nullopt);
    for (NodeId v = 0; v < n; ++v) {
        const auto& row = series.row(v);
        for (std::size_t m = baseline.training_intervals; m < series.interval_count(); ++m) {
            if (static_cast<double>(row[m]) > baseline.threshold[v]) {
                report.first_detection[v] = static_cast<double>(m) * series.delta();
                break;
            }
        }
    }
    return report;
}

DetectionCurves detection_curves(const DetectionReport& report, const CentralSet& central,
                                 double injection_time, double delta, double horizon) {
    if (!(delta > 0.0)) throw ConfigError("interval length must be positive");
    if (!(horizon > injection_time)) throw ConfigError("horizon must exceed injection time");
    const NodeId n = static_cast<NodeId>(report.first_detection.size());
    if (central.members.empty()) throw ConfigError("central set is empty");
    std::vector<NodeId> noncentral;
    for (NodeId v = 0; v < n; ++v) {
        if (!central.contains(v)) noncentral.push_back(v);
    }
    auto fraction_detected_by = [&](const std::vector<NodeId>& group, double t) {
        std::size_t hits = 0;
        for (NodeId v : group) {
            const auto& fd = report.first_detection[v];
            if (fd && *fd <= t + 1e-9) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(group.size());
    };
    DetectionCurves curves;
    const auto total = static_cast<std::size_t>(std::ceil(horizon / delta - 1e-9));
    for (std::size_t m = 0; m < total; ++m) {
        const double end = static_cast<double>(m + 1) * delta;
        if (end <= injection_time + 1e-9) continue;
        curves.time.push_back(end);
        curves.central.push_back(fraction_detected_by(central.members, end));
        if (!noncentral.empty()) {
            curves.noncentral.push_back(fraction_detected_by(noncentral, end));
        }
    }
    return curves;
}

void write_detection_csv(const DetectionReport& report, const CentralSet& central,
                         std::ostream& out) {
    out << "node,is_central,first_detection_time\n";
    char buf[96];
    for (NodeId v = 0; v < report.first_detection.size(); ++v) {
        const int is_central = central.contains(v) ? 1 : 0;
        const auto& fd = report.first_detection[v];
        int len;
        if (fd) {
            len = std::snprintf(buf, sizeof buf, "%u,%d,%.6f\n", v, is_central, *fd);
        } else {
            len = std::snprintf(buf, sizeof buf, "%u,%d,\n", v, is_central);
        }
        out.write(buf, len);
    }
}

void write_curves_csv(const DetectionCurves& curves, std::ostream& out) {
    out << "time,central_fraction,noncentral_fraction\n";
    char buf[96];
    for (std::size_t i = 0; i < curves.time.size(); ++i) {
        int len;
        if (!curves.noncentral.empty()) {
            len = std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f\n", curves.time[i],
                                curves.central[i], curves.noncentral[i]);
        } else {
            len = std::snprintf(buf, sizeof buf, "%.6f,%.6f,\n", curves.time[i],
                                curves.central[i]);
        }
        out.write(buf, len);
    }
}

} // namespace netsentinel
