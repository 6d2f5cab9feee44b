#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "lifecast/types.hpp"

namespace lifecast {

struct RejectedRow {
    std::size_t line;  // 1-based line number in the input file
    std::string reason;
};

struct IngestReport {
    std::size_t total_rows = 0;
    std::size_t accepted_events = 0;
    std::size_t dropped_small_cascades = 0;
    std::vector<RejectedRow> rejected;
};

/// Parses an event log into per-cascade, time-sorted, zero-offset event lists.
///
/// Accepted row shapes, one event per line:
///   - delimited text (tab, comma, or spaces) with fields
///     cascade_id, source, target, t; an optional header row naming them
///     may reorder the columns
///   - a JSON object per line with the same four fields
/// `t` is either minutes (real number) or an ISO 8601 timestamp.
///
/// Rows that fail to parse and self-loop rows are recorded in the report and
/// skipped. Cascades with fewer than `min_size` events are dropped and
/// counted. Cascades come back sorted by id; event order within a cascade is
/// a stable sort by time.
std::vector<Cascade> ingest_cascades(const std::vector<std::string>& lines,
                                     std::size_t min_size, NodeTable& names,
                                     IngestReport& report);

std::vector<Cascade> ingest_cascades_file(const std::filesystem::path& path,
                                          std::size_t min_size, NodeTable& names,
                                          IngestReport& report);

/// Loads the historical interaction graph: delimited text, two node columns
/// per row, optional "source,target" header. Self-loops are skipped.
HistoryGraph load_history_file(const std::filesystem::path& path, NodeTable& names);

/// Serializes cascades back to the normalized delimited form that
/// ingest_cascades accepts (header + one row per event).
std::string normalized_event_log(const std::vector<Cascade>& cascades,
                                 const NodeTable& names);

}  // namespace lifecast
