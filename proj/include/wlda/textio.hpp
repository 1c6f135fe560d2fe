#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wlda::textio {

/// Exact hexadecimal rendering ("%a"); parses back bit-for-bit.
std::string hex_double(double v);

/// Shortest decimal that round-trips (for human-facing reports).
std::string decimal(double v);

/// Strict parsers; throw ParseError(path, line, ...) on malformed input.
double parse_double(std::string_view token, const std::string& path, std::size_t line);
std::uint64_t parse_u64(std::string_view token, const std::string& path, std::size_t line);

}  // namespace wlda::textio
