#pragma once

// Locale-independent number formatting and parsing.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "pcfit/error.hpp"

namespace pcfit {

/// Shortest decimal that parses back to the same double; "inf"/"nan" for
/// non-finite values.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Fixed-point with `digits` decimals.
inline std::string format_fixed(double v, int digits) {
  char buf[128];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  if (res.ec != std::errc{}) return format_double(v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  const std::string_view s = trim(text);
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (s.empty() || res.ec != std::errc{} || res.ptr != last) {
    throw ConfigError("invalid value for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

inline double parse_double(std::string_view text, std::string_view what) { return parse_number<double>(text, what); }
inline long long parse_int(std::string_view text, std::string_view what) { return parse_number<long long>(text, what); }
inline std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  return parse_number<std::uint64_t>(text, what);
}

}  // namespace pcfit
