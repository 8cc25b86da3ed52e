#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

#include "mpsim/network.hpp"

namespace mpsim::csv {

// Shortest round-trip decimal form, so output bytes are reproducible.
inline std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

inline std::string fmt(long long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

inline std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Accumulates comment lines, a header, and rows; writes the whole file
// atomically (temp file + rename) so interrupted processes never leave a
// partial table behind.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void comment(const std::string& line) { comments_.push_back(line); }

  void row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
      throw ConfigError("csv: row width does not match the header");
    rows_.push_back(std::move(cells));
  }

  std::string render() const {
    std::string out;
    for (const std::string& c : comments_) {
      out += "# ";
      out += c;
      out += '\n';
    }
    append_line(out, columns_);
    for (const std::vector<std::string>& r : rows_) append_line(out, r);
    return out;
  }

  std::size_t row_count() const { return rows_.size(); }

 private:
  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += escape(cells[i]);
    }
    out += '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

// Atomic write: contents land under `path` entirely or not at all.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace mpsim::csv
