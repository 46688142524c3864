#pragma once

#include "pfdyn/trajectory.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace pfdyn {

/// One NDJSON line (no trailing newline). `kind` is "initial" or "step".
std::string row_to_json_line(const DiagnosticsRow& row, const char* kind);
std::string failure_to_json_line(const FailureRecord& failure);

/// Diagnostics stream as read back from disk.
struct StoredRecord {
    DiagnosticsRow initial;
    std::vector<DiagnosticsRow> rows;
    std::optional<FailureRecord> failure;
};

/// Throws IoError on a missing file, malformed line or missing initial row.
StoredRecord read_ndjson(const std::filesystem::path& path);

/// Appends rows as they are produced; flushes after every line.
class NdjsonWriter {
public:
    NdjsonWriter(const std::filesystem::path& path, bool append);
    void write_row(const DiagnosticsRow& row, const char* kind);
    void write_failure(const FailureRecord& failure);

private:
    void write_line(const std::string& line);
    std::filesystem::path path_;
    std::ofstream out_;
};

/// Rewrites `path` keeping the initial row and step rows with step <= max_step;
/// failure lines are dropped.
void truncate_ndjson(const std::filesystem::path& path, long max_step);

/// CSV with a header line, initial row first.
void write_csv(const std::filesystem::path& path, const DiagnosticsRow& initial,
               const std::vector<DiagnosticsRow>& rows);

/// Whole-record convenience: initial, rows and failure (if any).
void write_ndjson(const std::filesystem::path& path, const TrajectoryRecord& record);

}  // namespace pfdyn
