#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "netsentinel/sim.hpp"

namespace netsentinel {

/// Outcome of importing a whitespace-delimited legacy trace.
struct ImportResult {
    std::vector<TraceRecord> records;
    std::uint64_t total_lines = 0;
    std::uint64_t skipped = 0;  // blank, comment and non-conforming lines
    std::uint64_t warnings = 0; // arrivals for packets never seen sent
};

/// Parses the legacy format, one event per line:
///
///   <op> <time> _<node>_ <layer> --- <packet_id> <type> <size> ...
///
/// op is one of s/r/d/f (send, receive, drop, forward); layer is one of
/// AGT, RTR, MAC. Trailing fields are ignored. Lines
/// that do not conform are counted and skipped; if more than half of all
/// lines skip, the file is rejected with FormatError.
///
/// origin_time of every record is the earliest send time seen for its
/// packet id; arrivals with no send at all keep their own time and count
/// one warning. flow ids are not represented in the legacy format and
/// import as 0.
ImportResult import_legacy_trace(std::istream& in);

/// File variant; IoError when the file cannot be opened.
ImportResult load_legacy_trace(const std::string& path);

} // namespace netsentinel
