#pragma once

// Private text I/O helpers shared by the parsers and writers in core/src.
// All number formatting goes through std::to_chars / std::from_chars so that
// output is locale independent and doubles round-trip exactly.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wnfdi/errors.hpp"

namespace wnfdi::textio {

// Shortest representation that parses back to the same double.
inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(std::uint64_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(std::int64_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(int v) { return fmt(static_cast<std::int64_t>(v)); }

// 16 lowercase hex digits, zero padded.
inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

inline bool parse_double(std::string_view sv, double& out) {
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  return res.ec == std::errc() && res.ptr == sv.data() + sv.size();
}

inline bool parse_i64(std::string_view sv, std::int64_t& out) {
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  return res.ec == std::errc() && res.ptr == sv.data() + sv.size();
}

inline bool parse_int(std::string_view sv, int& out) {
  std::int64_t v = 0;
  if (!parse_i64(sv, v) || v < INT32_MIN || v > INT32_MAX) return false;
  out = static_cast<int>(v);
  return true;
}

inline bool parse_u64(std::string_view sv, std::uint64_t& out) {
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  return res.ec == std::errc() && res.ptr == sv.data() + sv.size();
}

inline bool parse_hex64(std::string_view sv, std::uint64_t& out) {
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), out, 16);
  return res.ec == std::errc() && res.ptr == sv.data() + sv.size();
}

inline std::string_view trim(std::string_view sv) {
  while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t' ||
                         sv.front() == '\r' || sv.front() == '\n'))
    sv.remove_prefix(1);
  while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' ||
                         sv.back() == '\r' || sv.back() == '\n'))
    sv.remove_suffix(1);
  return sv;
}

inline std::vector<std::string_view> split_ws(std::string_view sv) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < sv.size()) {
    while (i < sv.size() && (sv[i] == ' ' || sv[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < sv.size() && sv[j] != ' ' && sv[j] != '\t') ++j;
    if (j > i) out.push_back(sv.substr(i, j - i));
    i = j;
  }
  return out;
}

// Strips a trailing comment starting at any of `markers`.
inline std::string_view strip_comment(std::string_view sv,
                                      std::string_view markers) {
  for (std::size_t i = 0; i < sv.size(); ++i) {
    if (markers.find(sv[i]) != std::string_view::npos)
      return sv.substr(0, i);
  }
  return sv;
}

// Splits text into lines; tolerates both \n and \r\n, no trailing newline.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) {
        std::string_view line = text.substr(start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
      }
      break;
    }
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

std::string read_file(const std::string& path);  // throws io_error
void write_file(const std::string& path, std::string_view content);

}  // namespace wnfdi::textio
