// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0
//
// Internal text helpers shared by the parsers, writers and the CLI.
#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace pcroot::detail {

// %.17g: enough digits for an exact binary64 round trip.
inline std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string fmt_g(double x, int sig_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig_digits, x);
  return buf;
}

inline std::string_view strip(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t b = 0;
  while (true) {
    size_t e = s.find(sep, b);
    if (e == std::string_view::npos) {
      out.push_back(s.substr(b));
      return out;
    }
    out.push_back(s.substr(b, e - b));
    b = e + 1;
  }
}

// Iterates over lines, reporting 1-based line numbers; strips '#' comments.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Returns false at end of input. Skips blank (post-comment) lines.
  bool next(std::string_view& line, size_t& line_no) {
    while (pos_ < text_.size()) {
      size_t e = text_.find('\n', pos_);
      std::string_view raw;
      if (e == std::string_view::npos) {
        raw = text_.substr(pos_);
        pos_ = text_.size();
      } else {
        raw = text_.substr(pos_, e - pos_);
        pos_ = e + 1;
      }
      ++line_no_;
      size_t hash = raw.find('#');
      if (hash != std::string_view::npos) raw = raw.substr(0, hash);
      raw = strip(raw);
      if (!raw.empty()) {
        line = raw;
        line_no = line_no_;
        return true;
      }
    }
    return false;
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  size_t line_no_ = 0;
};

}  // namespace pcroot::detail
