#include "wlda/textio.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "wlda/errors.hpp"

namespace wlda::textio {

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string decimal(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view token, const std::string& path, std::size_t line) {
  std::string s(token);
  if (s.empty()) throw ParseError(path, line, "expected a number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw ParseError(path, line, "malformed number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view token, const std::string& path, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    throw ParseError(path, line, "malformed integer '" + std::string(token) + "'");
  return v;
}

}  // namespace wlda::textio

