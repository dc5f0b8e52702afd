// netsentinel — sentinel-node selection and volume-anomaly detection
// experiments on simulated multi-hop networks.
//
// Subcommands:
//   run         run a full experiment from a config file
//   centrality  score a graph file with one centrality measure
//   import      convert a legacy whitespace trace to the native CSV format
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error, 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "netsentinel/experiment.hpp"
#include "netsentinel/trace_import.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

int cmd_run(const std::string& config_path, const std::string& out_dir, int replications,
            long long seed) {
    netsentinel::SimConfig cfg = netsentinel::load_config(config_path);
    if (replications >= 0) cfg.replications = static_cast<std::uint32_t>(replications);
    if (seed >= 0) cfg.rng_seed = static_cast<std::uint64_t>(seed);
    cfg.validate();

    const std::size_t total = cfg.anomaly_rates.size() * cfg.replications;
    std::size_t done = 0;
    auto progress = [&](const netsentinel::ReplicationResult& res) {
        ++done;
        std::fprintf(stderr, "[%zu/%zu] rate=%g replication=%u%s%s\n", done, total,
                     res.anomaly_rate, res.replication,
                     res.error.empty() ? "" : " FAILED: ", res.error.c_str());
    };
    const auto summary = netsentinel::run_experiment(cfg, progress);
    netsentinel::emit_outputs(summary, out_dir);
    std::fprintf(stderr, "wrote %s\n", out_dir.c_str());
    return 0;
}

int cmd_centrality(const std::string& graph_path, const std::string& measure_name,
                   unsigned max_hops) {
    const auto g = netsentinel::load_graph(graph_path);
    const auto measure = netsentinel::measure_from_name(measure_name);
    netsentinel::CentralityReport report;
    if (measure == netsentinel::Measure::information_exact ||
        measure == netsentinel::Measure::information_pathsum) {
        report = netsentinel::information_centrality(g, measure, max_hops);
    } else {
        report = netsentinel::compute_centrality(g, measure);
    }
    netsentinel::write_centrality_csv(report, std::cout);
    return 0;
}

int cmd_import(const std::string& trace_path, const std::string& out_path) {
    const auto imported = netsentinel::load_legacy_trace(trace_path);
    std::ofstream out(out_path);
    if (!out) throw netsentinel::IoError("cannot write: " + out_path);
    netsentinel::write_trace_csv_header(out);
    for (const auto& rec : imported.records) {
        netsentinel::write_trace_csv_record(out, rec);
    }
    out.flush();
    if (!out) throw netsentinel::IoError("error while writing: " + out_path);
    std::fprintf(stderr, "imported %zu records (%llu lines skipped, %llu warnings)\n",
                 imported.records.size(),
                 static_cast<unsigned long long>(imported.skipped),
                 static_cast<unsigned long long>(imported.warnings));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sentinel-node selection and anomaly-detection experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    std::string config_path, out_dir;
    int replications = -1;
    long long seed = -1;
    auto* run = app.add_subcommand("run", "run a full experiment from a config file");
    run->add_option("--config", config_path, "config file (key=value lines)")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--replications", replications, "override replication count");
    run->add_option("--seed", seed, "override rng_seed");

    std::string graph_path, measure = "information_exact";
    unsigned max_hops = 0;
    auto* cent = app.add_subcommand("centrality", "score a graph file, CSV to stdout");
    cent->add_option("--graph", graph_path, "graph file")->required();
    cent->add_option("--measure", measure,
                     "information_exact|information_pathsum|closeness|betweenness|"
                     "eigenvector|degree");
    cent->add_option("--max-hops", max_hops, "path-sum hop cap (0 = default)");

    std::string trace_path, trace_out;
    auto* imp = app.add_subcommand("import", "convert a legacy trace to native CSV");
    imp->add_option("--trace", trace_path, "legacy trace file")->required();
    imp->add_option("--out", trace_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // malformed invocation = configuration error
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, replications, seed);
        if (cent->parsed()) return cmd_centrality(graph_path, measure, max_hops);
        if (imp->parsed()) return cmd_import(trace_path, trace_out);
        std::cout << app.help();
        return 0;
    } catch (const netsentinel::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const netsentinel::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
