#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace harness {

std::string trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Splits on LF. A trailing newline does not produce an empty final element;
/// a trailing CR on any line is dropped.
std::vector<std::string> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

/// Scientific notation with 17 significant digits, uppercase E (golden format).
std::string format_scientific17(double v);

/// Strict full-token numeric parsing; throws ParseError on failure.
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

}  // namespace harness
