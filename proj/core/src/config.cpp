#include "netsentinel/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace netsentinel {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& val) {
    const char* begin = val.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (val.empty() || end != begin + val.size() || !std::isfinite(x)) {
        throw ConfigError(key + ": not a number: '" + val + "'");
    }
    return x;
}

template <typename T>
T to_uint(const std::string& key, const std::string& val) {
    T x{};
    const char* begin = val.data();
    const char* end = begin + val.size();
    const auto res = std::from_chars(begin, end, x);
    if (val.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError(key + ": not a nonnegative integer: '" + val + "'");
    }
    return x;
}

std::vector<double> to_double_list(const std::string& key, const std::string& val) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(val);
    while (std::getline(ss, item, ',')) {
        out.push_back(to_double(key, trim(item)));
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(17);
    ss << x;
    return ss.str();
}

std::string fmt(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += fmt(xs[i]);
    }
    return out;
}

} // namespace

void SimConfig::validate() const {
    if (n < 2) throw ConfigError("n must be >= 2");
    if (!(side > 0.0)) throw ConfigError("side must be positive");
    if (!(radio_range > 0.0)) throw ConfigError("radio_range must be positive");
    if (!(sim_time > 0.0)) throw ConfigError("sim_time must be positive");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (flow_count < 1) throw ConfigError("flow_count must be >= 1");
    if (!(baseline_rate > 0.0)) throw ConfigError("baseline_rate must be positive");
    if (packet_size < 1) throw ConfigError("packet_size must be >= 1");
    if (queue_cap < 1) throw ConfigError("queue_cap must be >= 1");
    if (!(link_rate > 0.0)) throw ConfigError("link_rate must be positive");
    if (prop_delay < 0.0) throw ConfigError("prop_delay must be >= 0");
    if (!(t_train > 0.0)) throw ConfigError("t_train must be positive");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(k > 0.0)) throw ConfigError("k must be positive");
    if (central_fractions.empty()) throw ConfigError("central_fractions must not be empty");
    for (const double f : central_fractions) {
        if (!(f > 0.0) || f > 1.0) {
            throw ConfigError("central_fractions entries must lie in (0, 1]");
        }
    }
    if (anomaly_rates.empty()) throw ConfigError("anomaly_rates must not be empty");
    for (const double r : anomaly_rates) {
        if (!(r > baseline_rate)) {
            throw ConfigError("anomaly_rates entries must exceed baseline_rate");
        }
    }
    if (t_seeds < 1) throw ConfigError("t_seeds must be >= 1");
    if (t_seeds > n) throw ConfigError("t_seeds must not exceed n");
    if (!(t_train < injection_time)) {
        throw ConfigError("t_train must be smaller than injection_time");
    }
    if (!(injection_time < sim_time)) {
        throw ConfigError("injection_time must be smaller than sim_time");
    }
    if (std::floor(t_train / delta + 1e-9) < 10.0) {
        throw ConfigError("training window must cover at least 10 intervals");
    }
    if (gibberish_packet_size < 1) {
        throw ConfigError("gibberish_packet_size must be >= 1");
    }
    if (ic_method != Measure::information_exact &&
        ic_method != Measure::information_pathsum) {
        throw ConfigError("ic_method must be information_exact or information_pathsum");
    }
}

SimParams SimConfig::sim_params() const {
    SimParams p;
    p.sim_time = sim_time;
    p.link_rate_bps = link_rate;
    p.prop_delay = prop_delay;
    p.queue_cap = queue_cap;
    return p;
}

AttackConfig SimConfig::attack_config(double anomaly_rate) const {
    AttackConfig a;
    a.t_seeds = t_seeds;
    a.injection_time = injection_time;
    a.anomaly_rate_bps = anomaly_rate;
    a.gibberish_packet_size = gibberish_packet_size;
    return a;
}

SimConfig parse_config(std::istream& in) {
    SimConfig cfg;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key == "T_train") key = "t_train";
        if (key == "\xce\x94") key = "delta"; // U+0394 Greek capital delta
        if (!seen.insert(key).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        }
        if (key == "n") {
            cfg.n = to_uint<NodeId>(key, val);
        } else if (key == "side") {
            cfg.side = to_double(key, val);
        } else if (key == "radio_range") {
            cfg.radio_range = to_double(key, val);
        } else if (key == "sim_time") {
            cfg.sim_time = to_double(key, val);
        } else if (key == "replications") {
            cfg.replications = to_uint<std::uint32_t>(key, val);
        } else if (key == "flow_count") {
            cfg.flow_count = to_uint<std::uint32_t>(key, val);
        } else if (key == "baseline_rate") {
            cfg.baseline_rate = to_double(key, val);
        } else if (key == "packet_size") {
            cfg.packet_size = to_uint<std::uint32_t>(key, val);
        } else if (key == "queue_cap") {
            cfg.queue_cap = to_uint<std::uint32_t>(key, val);
        } else if (key == "link_rate") {
            cfg.link_rate = to_double(key, val);
        } else if (key == "prop_delay") {
            cfg.prop_delay = to_double(key, val);
        } else if (key == "t_train") {
            cfg.t_train = to_double(key, val);
        } else if (key == "delta") {
            cfg.delta = to_double(key, val);
        } else if (key == "k") {
            cfg.k = to_double(key, val);
        } else if (key == "central_fractions") {
            cfg.central_fractions = to_double_list(key, val);
        } else if (key == "anomaly_rates") {
            cfg.anomaly_rates = to_double_list(key, val);
        } else if (key == "t_seeds") {
            cfg.t_seeds = to_uint<std::uint32_t>(key, val);
        } else if (key == "injection_time") {
            cfg.injection_time = to_double(key, val);
        } else if (key == "rng_seed") {
            cfg.rng_seed = to_uint<std::uint64_t>(key, val);
        } else if (key == "max_hops") {
            cfg.max_hops = to_uint<std::uint32_t>(key, val);
        } else if (key == "ic_method") {
            cfg.ic_method = measure_from_name(val);
        } else if (key == "gibberish_packet_size") {
            cfg.gibberish_packet_size = to_uint<std::uint32_t>(key, val);
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        }
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_config(in);
}

void write_config(const SimConfig& c, std::ostream& out) {
    out << "n=" << c.n << "\n";
    out << "side=" << fmt(c.side) << "\n";
    out << "radio_range=" << fmt(c.radio_range) << "\n";
    out << "sim_time=" << fmt(c.sim_time) << "\n";
    out << "replications=" << c.replications << "\n";
    out << "flow_count=" << c.flow_count << "\n";
    out << "baseline_rate=" << fmt(c.baseline_rate) << "\n";
    out << "packet_size=" << c.packet_size << "\n";
    out << "queue_cap=" << c.queue_cap << "\n";
    out << "link_rate=" << fmt(c.link_rate) << "\n";
    out << "prop_delay=" << fmt(c.prop_delay) << "\n";
    out << "t_train=" << fmt(c.t_train) << "\n";
    out << "delta=" << fmt(c.delta) << "\n";
    out << "k=" << fmt(c.k) << "\n";
    out << "central_fractions=" << fmt(c.central_fractions) << "\n";
    out << "anomaly_rates=" << fmt(c.anomaly_rates) << "\n";
    out << "t_seeds=" << c.t_seeds << "\n";
    out << "injection_time=" << fmt(c.injection_time) << "\n";
    out << "rng_seed=" << c.rng_seed << "\n";
    out << "max_hops=" << c.max_hops << "\n";
    out << "ic_method=" << measure_name(c.ic_method) << "\n";
    out << "gibberish_packet_size=" << c.gibberish_packet_size << "\n";
}

} // namespace netsentinel
