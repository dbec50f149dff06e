#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "rbsde/errors.hpp"

namespace rbsde {

/// Fixed shortest-roundtrip formatting; one spelling per double so reruns
/// with the same inputs produce byte-identical files.
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {
inline void csv_cell(std::string& line, double v) { line += csv_num(v); }
inline void csv_cell(std::string& line, int v) { line += std::to_string(v); }
inline void csv_cell(std::string& line, long long v) {
  line += std::to_string(v);
}
inline void csv_cell(std::string& line, std::size_t v) {
  line += std::to_string(v);
}
inline void csv_cell(std::string& line, bool v) { line += v ? '1' : '0'; }
inline void csv_cell(std::string& line, const char* v) { line += v; }
inline void csv_cell(std::string& line, const std::string& v) { line += v; }
}  // namespace detail

/// Accumulates a CSV document in memory: header row, comma separators,
/// line-feed terminators.
class CsvTable {
 public:
  explicit CsvTable(const std::string& header) { text_ = header + "\n"; }

  template <class... Ts>
  void row(const Ts&... cells) {
    std::string line;
    bool first = true;
    auto add = [&](const auto& c) {
      if (!first) line += ',';
      first = false;
      detail::csv_cell(line, c);
    };
    (add(cells), ...);
    text_ += line;
    text_ += '\n';
  }

  void raw_row(const std::string& line) {
    text_ += line;
    text_ += '\n';
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ParameterError("cannot write output file: " + path);
}

}  // namespace rbsde
