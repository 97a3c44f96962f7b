// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal CSV helpers. All files in this project are plain comma-separated
// tables without quoting, so a field may not itself contain a comma.

#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dysta/types.hpp"

namespace dysta::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline std::optional<double> to_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Shortest text that parses back to exactly `v`.
inline std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Reads a header-led table. Blank lines and lines starting with '#' are
/// skipped. The header must match `expected` exactly.
class Reader {
 public:
  Reader(std::istream& in, std::vector<std::string_view> expected) : in_(in) {
    std::string header;
    while (std::getline(in_, header)) {
      ++line_;
      auto t = trim(header);
      if (t.empty() || t.front() == '#') continue;
      if (split(t) != expected) {
        std::string want;
        for (auto e : expected) want += (want.empty() ? "" : ",") + std::string(e);
        throw ParseError(line_, "expected header '" + want + "'");
      }
      width_ = expected.size();
      return;
    }
    throw ParseError(line_, "empty file");
  }

  /// Next data row, or nullopt at end of input. The returned views point into
  /// an internal buffer valid until the next call.
  std::optional<std::vector<std::string_view>> next() {
    while (std::getline(in_, buf_)) {
      ++line_;
      auto t = trim(buf_);
      if (t.empty() || t.front() == '#') continue;
      auto fields = split(t);
      if (fields.size() != width_) {
        throw ParseError(line_, "expected " + std::to_string(width_) + " fields, got " +
                                    std::to_string(fields.size()));
      }
      return fields;
    }
    return std::nullopt;
  }

  std::size_t line() const { return line_; }

  double number(std::string_view s, const char* what) const {
    auto v = to_double(s);
    if (!v) throw ParseError(line_, std::string("bad ") + what + " '" + std::string(s) + "'");
    return *v;
  }

  std::int64_t integer(std::string_view s, const char* what) const {
    auto v = to_int(s);
    if (!v) throw ParseError(line_, std::string("bad ") + what + " '" + std::string(s) + "'");
    return *v;
  }

 private:
  std::istream& in_;
  std::string buf_;
  std::size_t line_ = 0;
  std::size_t width_ = 0;
};

}  // namespace dysta::csv
