#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace domcx::csv {

/// Shortest decimal form that parses back to the identical double.
std::string format_real(double value);

std::vector<std::string> split_line(std::string_view line, char sep = ',');

/// Strict parsers; throw FormatError naming `what` on malformed input.
double parse_real(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);

/// Reads all lines, dropping a trailing '\r' and skipping lines starting with '#'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace domcx::csv
