#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seizure::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char sep);
// Whole-string numeric parse; surrounding whitespace allowed.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);
// Shortest representation that round-trips exactly.
std::string format_double(double v);

// Splits a file's contents into lines, accepting LF or CRLF.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace seizure::text
