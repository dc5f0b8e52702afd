#include "netsentinel/trace_import.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace netsentinel {

namespace {

bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + tok.size() && !tok.empty();
}

bool parse_uint(const std::string& tok, std::uint64_t& out) {
    if (tok.empty()) return false;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

bool parse_node_token(const std::string& tok, std::uint64_t& out) {
    // `_<id>_`
    if (tok.size() < 3 || tok.front() != '_' || tok.back() != '_') return false;
    return parse_uint(tok.substr(1, tok.size() - 2), out);
}

} // namespace

ImportResult import_legacy_trace(std::istream& in) {
    ImportResult result;
    std::string line;
    std::vector<std::size_t> awaiting_origin; // records needing a send lookup
    while (std::getline(in, line)) {
        ++result.total_lines;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            ++result.skipped;
            continue;
        }
        std::istringstream ls(line);
        std::string op, time_tok, node_tok, layer, reason, pid_tok, type_tok, size_tok;
        if (!(ls >> op >> time_tok >> node_tok >> layer >> reason >> pid_tok >> type_tok >>
              size_tok)) {
            ++result.skipped;
            continue;
        }
        EventType event;
        if (op == "s") {
            event = EventType::send;
        } else if (op == "r") {
            event = EventType::receive;
        } else if (op == "d") {
            event = EventType::drop;
        } else if (op == "f") {
            event = EventType::forward;
        } else {
            ++result.skipped;
            continue;
        }
        double time = 0.0;
        std::uint64_t node = 0, pid = 0, size = 0;
        if (!parse_double(time_tok, time) || !parse_node_token(node_tok, node) ||
            (layer != "AGT" && layer != "RTR" && layer != "MAC") || reason != "---" ||
            !parse_uint(pid_tok, pid) || type_tok.empty() || !parse_uint(size_tok, size) ||
            size > std::numeric_limits<std::uint32_t>::max() ||
            node > std::numeric_limits<NodeId>::max()) {
            ++result.skipped;
            continue;
        }
        TraceRecord rec;
        rec.event = event;
        rec.time = time;
        rec.node = static_cast<NodeId>(node);
        rec.packet_id = pid;
        rec.size = static_cast<std::uint32_t>(size);
        rec.flow_id = 0; // not represented in the legacy format
        rec.origin_time = time;
        result.records.push_back(rec);
    }
    if (result.total_lines > 0 && result.skipped * 2 > result.total_lines) {
        throw FormatError("more than half of the trace lines (" +
                          std::to_string(result.skipped) + "/" +
                          std::to_string(result.total_lines) + ") did not parse");
    }
    // second pass: earliest send per packet id defines origin_time
    std::unordered_map<std::uint64_t, double> first_send;
    for (const auto& rec : result.records) {
        if (rec.event == EventType::send) {
            auto [it, inserted] = first_send.emplace(rec.packet_id, rec.time);
            if (!inserted && rec.time < it->second) it->second = rec.time;
        }
    }
    for (auto& rec : result.records) {
        const auto it = first_send.find(rec.packet_id);
        if (it != first_send.end()) {
            rec.origin_time = it->second;
        } else {
            // arrival with no matching send: keep own time, flag it
            ++result.warnings;
        }
    }
    return result;
}

ImportResult load_legacy_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file: " + path);
    return import_legacy_trace(in);
}

} // namespace netsentinel
