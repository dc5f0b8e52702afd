#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "netsentinel/errors.hpp"
#include "netsentinel/experiment.hpp"
#include "support/oracles.hpp"

using namespace netsentinel;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SimConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

// small but fully featured experiment: trains, attacks, detects in ~a second
SimConfig tiny_config() {
    SimConfig c;
    c.n = 16;
    c.side = 30.0;
    c.radio_range = 14.0;
    c.sim_time = 40.0;
    c.replications = 2;
    c.flow_count = 6;
    c.baseline_rate = 2e5;
    c.packet_size = 512;
    c.queue_cap = 1000;
    c.link_rate = 5e6;
    c.prop_delay = 5e-6;
    c.t_train = 12.0;
    c.delta = 1.0;
    c.k = 5.0;
    c.central_fractions = {0.25};
    c.anomaly_rates = {2e6};
    c.t_seeds = 1;
    c.injection_time = 15.0;
    c.rng_seed = 4;
    return c;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("config round trip through the echo writer") {
    SimConfig c = tiny_config();
    c.central_fractions = {0.15, 0.2};
    c.anomaly_rates = {1e7, 5e7};
    c.ic_method = Measure::information_exact;
    std::ostringstream out;
    write_config(c, out);
    auto back = parse_text(out.str());
    std::ostringstream out2;
    write_config(back, out2);
    CHECK(out.str() == out2.str()); // parse(echo(c)) echoes identically
    CHECK(back.n == c.n);
    CHECK(back.central_fractions == c.central_fractions);
    CHECK(back.anomaly_rates == c.anomaly_rates);
    CHECK(back.rng_seed == c.rng_seed);
}

TEST_CASE("config parser accepts comments, blanks, and the spelled aliases") {
    auto c = parse_text(
        "# experiment\n"
        "n = 20\n"
        "\n"
        "T_train = 30\n"   // alias of t_train
        "Δ = 0.5\n"   // alias of delta
        "injection_time = 40\n"
        "sim_time = 120\n"
        "radio_range = 40\n"
        "side = 50\n");
    CHECK(c.n == 20);
    CHECK(c.t_train == doctest::Approx(30.0));
    CHECK(c.delta == doctest::Approx(0.5));
    // untouched keys keep their defaults
    CHECK(c.queue_cap == 1000);
    CHECK(c.central_fractions == std::vector<double>{0.15, 0.20});
}

TEST_CASE("config parser rejects unknown keys, duplicates, and bad values") {
    CHECK_THROWS_AS(parse_text("frobnicate = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_text("n = 20\nn = 30\n"), ConfigError);
    CHECK_THROWS_AS(parse_text("n = pony\n"), ConfigError);
    CHECK_THROWS_AS(parse_text("n 20\n"), ConfigError);        // missing '='
    CHECK_THROWS_AS(parse_text("n = -5\n"), ConfigError);
    CHECK_THROWS_AS(parse_text("delta = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_text("ic_method = closeness\n"), ConfigError);
    CHECK_THROWS_AS(parse_text("central_fractions =\n"), ConfigError);
}

TEST_CASE("config invariants are enforced before any run") {
    SimConfig c = tiny_config();
    c.injection_time = c.t_train; // injection must follow training strictly
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = tiny_config();
    c.injection_time = c.sim_time + 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = tiny_config();
    c.anomaly_rates = {c.baseline_rate}; // anomaly must exceed baseline
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = tiny_config();
    c.central_fractions = {0.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = tiny_config();
    c.t_train = 5.0; // only 5 training intervals
    c.injection_time = 8.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = tiny_config();
    c.t_seeds = c.n + 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    CHECK_NOTHROW(tiny_config().validate());
}

TEST_CASE("classification picks the advertised sets") {
    // ic route: the path's middle node wins
    auto rep = information_centrality(oracles::path_graph(3));
    auto set = classify_central(ClassifyMethod::ic, rep, {}, 0.33);
    REQUIRE(set.size() == 1);
    CHECK(set.contains(1));

    // arrival route: middle of a line served from both ends ranks first
    std::vector<double> arrivals{3.0, 1.0, 2.5, kInf};
    auto by_arrival = classify_central(ClassifyMethod::arrival_time, rep, arrivals, 0.5);
    REQUIRE(by_arrival.size() == 2);
    CHECK(by_arrival.contains(1));
    CHECK(by_arrival.contains(2));
    // +infinity (never observed) ranks last
    auto wide = classify_central(ClassifyMethod::arrival_time, rep, arrivals, 0.75);
    CHECK_FALSE(wide.contains(3));
}

TEST_CASE("classification set sizes match the fraction rule") {
    std::vector<double> arrivals(200);
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        arrivals[i] = static_cast<double>(i);
    }
    CentralityReport rep;
    rep.scores.assign(200, 0.0);
    for (std::size_t i = 0; i < 200; ++i) rep.scores[i] = 200.0 - static_cast<double>(i);
    rep.ranking = rank_by_score(rep.scores);
    CHECK(classify_central(ClassifyMethod::ic, rep, arrivals, 0.15).size() == 30);
    CHECK(classify_central(ClassifyMethod::arrival_time, rep, arrivals, 0.15).size() == 30);
    CHECK(classify_central(ClassifyMethod::ic, rep, arrivals, 0.20).size() == 40);
}

TEST_CASE("rank agreement frozen examples") {
    // scores descending 4,3,2,1 -> IC ranking 0,1,2,3
    CentralityReport rep;
    rep.scores = {4.0, 3.0, 2.0, 1.0};
    rep.ranking = rank_by_score(rep.scores);

    bool degenerate = true;
    CHECK(rank_agreement(rep, {1.0, 2.0, 3.0, 4.0}, &degenerate) ==
          doctest::Approx(1.0).epsilon(1e-12)); // identical orderings
    CHECK_FALSE(degenerate);

    CHECK(rank_agreement(rep, {4.0, 3.0, 2.0, 1.0}) ==
          doctest::Approx(-1.0).epsilon(1e-12)); // exactly reversed

    // orderings (1,2,3,4) vs (1,2,4,3): rho = 1 - 6*2/(4*15) = 0.8
    CHECK(rank_agreement(rep, {1.0, 2.0, 4.0, 3.0}) ==
          doctest::Approx(0.8).epsilon(1e-12));

    // constant arrival side is degenerate and reports 0
    CHECK(rank_agreement(rep, {5.0, 5.0, 5.0, 5.0}, &degenerate) == doctest::Approx(0.0));
    CHECK(degenerate);

    // infinite arrivals are ranked, not dropped
    CHECK(rank_agreement(rep, {1.0, 2.0, 3.0, kInf}) == doctest::Approx(1.0));
}

TEST_CASE("median conventions") {
    CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
    CHECK(median({1.0}) == doctest::Approx(1.0));
    CHECK(std::isinf(median({1.0, kInf, kInf})));
}

TEST_CASE("pooled classification averages rank positions, not latencies") {
    // node 0 logs one fluke sub-millisecond replication; rank pooling must
    // not let it crowd out node 1, which every replication reaches reliably
    ReplicationResult r1, r2;
    r1.arrival_mean = {0.4, 1.0, 2.0, kInf};
    r1.arrival_count = {1000, 10, 10, 0};
    r1.ic_ranking = {0, 1, 2, 3};
    r2.arrival_mean = {kInf, 1.0, 0.9, kInf};
    r2.arrival_count = {0, 10, 10, 0};
    r2.ic_ranking = {1, 0, 2, 3};

    auto p = pool_agreement({&r1, &r2}, 0.5, 4);

    // arrival midranks r1: {1, 2, 3, 4}; r2: inf ties share (3+4)/2 = 3.5
    //   -> {3.5, 2, 1, 3.5}. Sums: node0 4.5, node1 4, node2 4, node3 7.5
    //   -> ascending (tie by id): 1, 2, 0, 3 -> top-2 {1, 2}.
    // Latency-weighted pooling would have ranked node 0 first on the back
    // of its thousand 0.4 ms samples.
    REQUIRE(p.arrival_set.members.size() == 2);
    CHECK(p.arrival_set.members == std::vector<NodeId>{1, 2});

    // mean IC rank positions: node0 (0+1)/2, node1 (1+0)/2 tie -> id order;
    // nodes 2,3 at 2,3 -> top-2 {0,1}
    CHECK(p.ic_set.members == std::vector<NodeId>{0, 1});
    CHECK(p.overlap == doctest::Approx(0.5)); // {1,2} vs {0,1} share node 1

    // a node never observed in any replication stays ranked last
    auto q = pool_agreement({&r1, &r2}, 0.75, 4); // k = 3
    REQUIRE(q.arrival_set.members.size() == 3);
    CHECK_FALSE(q.arrival_set.contains(3));

    CHECK_THROWS_AS(pool_agreement({}, 0.5, 4), ConfigError);
    ReplicationResult bad;
    bad.error = "boom";
    CHECK_THROWS_AS(pool_agreement({&bad}, 0.5, 4), ConfigError);
}

TEST_CASE("experiment runs end to end on a small mesh") {
    auto cfg = tiny_config();
    int callbacks = 0;
    auto summary = run_experiment(cfg, [&](const ReplicationResult& r) {
        ++callbacks;
        CHECK(r.error.empty());
    });
    CHECK(callbacks == 2);
    REQUIRE(summary.results.size() == 2); // 1 rate x 2 replications
    CHECK(summary.measure_reports.size() == 5); // path-sum excluded
    REQUIRE(summary.pooled.size() == 1);        // 1 rate x 1 fraction
    CHECK(summary.pooled[0].anomaly_rate == doctest::Approx(2e6));
    CHECK(summary.pooled[0].ic_set.size() == 4);
    CHECK(summary.pooled[0].arrival_set.size() == 4);
    CHECK(summary.pooled[0].overlap >= 0.0);
    CHECK(summary.pooled[0].overlap <= 1.0);
    for (const auto& res : summary.results) {
        REQUIRE(res.error.empty());
        CHECK(res.counters.sends > 0);
        CHECK(res.counters.receives > 0);
        CHECK(res.spearman >= -1.0);
        CHECK(res.spearman <= 1.0);
        REQUIRE(res.central_ic.size() == 1);
        CHECK(res.central_ic[0].size() == 4); // ceil(0.25 * 16)
        CHECK(res.central_arrival[0].size() == 4);
        CHECK(res.overlap[0] >= 0.0);
        CHECK(res.overlap[0] <= 1.0);
        REQUIRE(res.curves.size() == 1);
        const auto& curves = res.curves[0];
        REQUIRE(!curves.time.empty());
        CHECK(curves.time.front() == doctest::Approx(16.0)); // first boundary after 15
        for (std::size_t i = 1; i < curves.central.size(); ++i) {
            CHECK(curves.central[i] >= curves.central[i - 1]);
        }
        CHECK(res.infection_times.size() == 16);
        NodeId infected = 0;
        for (double t : res.infection_times) {
            if (std::isfinite(t)) {
                ++infected;
                CHECK(t >= cfg.injection_time);
            }
        }
        CHECK(infected >= cfg.t_seeds);
    }
}

TEST_CASE("matched replications share seeds across anomaly rates") {
    auto cfg = tiny_config();
    cfg.anomaly_rates = {2e6, 8e6};
    auto summary = run_experiment(cfg);
    REQUIRE(summary.results.size() == 4); // rate-major ordering
    CHECK(summary.results[0].anomaly_rate == doctest::Approx(2e6));
    CHECK(summary.results[2].anomaly_rate == doctest::Approx(8e6));
    // same child seed => same topology, flows, seeds: training identical, so
    // the IC classification and spearman agree across rates
    for (std::uint32_t k = 0; k < 2; ++k) {
        const auto& lo = summary.results[k];
        const auto& hi = summary.results[2 + k];
        CHECK(lo.replication == hi.replication);
        CHECK(lo.spearman == doctest::Approx(hi.spearman).epsilon(1e-12));
        CHECK(lo.central_ic[0].members == hi.central_ic[0].members);
    }
}

TEST_CASE("experiment summaries are deterministic") {
    auto cfg = tiny_config();
    auto a = run_experiment(cfg);
    auto b = run_experiment(cfg);
    REQUIRE(a.results.size() == b.results.size());
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        CHECK(a.results[i].counters.sends == b.results[i].counters.sends);
        CHECK(a.results[i].counters.receives == b.results[i].counters.receives);
        CHECK(a.results[i].counters.drops == b.results[i].counters.drops);
        CHECK(a.results[i].spearman == b.results[i].spearman);
        CHECK(a.results[i].infection_times == b.results[i].infection_times);
        CHECK(a.results[i].curves[0].central == b.results[i].curves[0].central);
    }
}

TEST_CASE("emitted output tree is complete and deterministic") {
    namespace fs = std::filesystem;
    auto cfg = tiny_config();
    auto summary = run_experiment(cfg);
    auto base = fs::temp_directory_path() / "netsentinel_emit_test";
    fs::remove_all(base);
    emit_outputs(summary, (base / "a").string());
    emit_outputs(summary, (base / "b").string());

    CHECK(fs::exists(base / "a" / "config.txt"));
    CHECK(fs::exists(base / "a" / "centrality.csv"));
    CHECK(fs::exists(base / "a" / "summary.txt"));

    // exactly one combo directory for 1 rate x 1 fraction
    int combo_dirs = 0;
    fs::path combo;
    for (const auto& entry : fs::directory_iterator(base / "a")) {
        if (entry.is_directory()) {
            ++combo_dirs;
            combo = entry.path();
        }
    }
    CHECK(combo_dirs == 1);
    CHECK(fs::exists(combo / "curves_r0.csv"));
    CHECK(fs::exists(combo / "curves_r1.csv"));
    CHECK(fs::exists(combo / "curves_median.csv"));
    CHECK(fs::exists(combo / "detections_r0.csv"));
    CHECK(fs::exists(combo / "infections_r0.csv"));

    // byte-identical across emissions
    for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
        if (!entry.is_regular_file()) continue;
        auto rel = fs::relative(entry.path(), base / "a");
        CHECK(read_file(entry.path()) == read_file(base / "b" / rel));
    }

    // config echo in the output dir parses back to the same experiment
    auto echoed = load_config((base / "a" / "config.txt").string());
    CHECK(echoed.n == cfg.n);
    CHECK(echoed.rng_seed == cfg.rng_seed);

    fs::remove_all(base);
}

} // TEST_SUITE
