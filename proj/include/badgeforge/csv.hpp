#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace badgeforge::csv {

// CSV cell formatting: 12 significant digits, decimal point, no locale.
inline std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string format(long v) { return std::to_string(v); }
inline std::string format(int v) { return std::to_string(v); }
inline std::string format(const std::string& v) { return v; }
inline std::string format(const char* v) { return v; }

// Accumulates rows and renders a comma-separated, newline-terminated table.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  template <typename... Ts>
  void row(const Ts&... cells) {
    std::vector<std::string> r{format(cells)...};
    rows_.push_back(std::move(r));
  }

  void row_vector(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string render() const {
    std::ostringstream out;
    if (!header_.empty()) emit(out, header_);
    for (const auto& r : rows_) emit(out, r);
    return out.str();
  }

  std::size_t size() const { return rows_.size(); }

 private:
  static void emit(std::ostringstream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace badgeforge::csv
