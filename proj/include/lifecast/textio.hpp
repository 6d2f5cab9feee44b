#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lifecast::textio {

/// Splits a delimited row. Tabs win over commas; otherwise runs of spaces.
std::vector<std::string> split_fields(std::string_view line);

/// Strict full-string floating point parse.
std::optional<double> parse_number(std::string_view s);

/// Accepts either a plain number of minutes or an ISO 8601 timestamp
/// (YYYY-MM-DD[T ]HH:MM[:SS[.frac]][Z]) converted to minutes since epoch.
std::optional<double> parse_time_minutes(std::string_view s);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace lifecast::textio
