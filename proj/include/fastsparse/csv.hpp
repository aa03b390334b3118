#ifndef FASTSPARSE_CSV_HPP
#define FASTSPARSE_CSV_HPP

// Numeric CSV with a header row. The column named `y` holds labels; every
// other column is a feature.

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace fastsparse {

struct CsvTable {
  std::vector<std::string> names;               // feature columns, file order
  std::vector<std::vector<double>> columns;
  std::optional<std::vector<double>> labels;

  std::size_t rows() const { return labels ? labels->size() : columns.empty() ? 0 : columns[0].size(); }

  /// Design matrix; without a label column every label is set to +1.
  DesignMatrix matrix() const {
    std::vector<double> y = labels ? *labels : std::vector<double>(rows(), 1.0);
    return DesignMatrix(columns, std::move(y), names);
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  }
  return out;
}

inline double parse_cell(const std::string& s, std::size_t line, const std::string& col) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size() || errno == ERANGE)
    throw InputError("line " + std::to_string(line) + ", column '" + col + "': not a number: '" + s + "'");
  return v;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV input");
  const auto header = detail::split_csv_line(line);
  CsvTable t;
  std::optional<std::size_t> ycol;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw InputError("empty column name in CSV header");
    if (header[c] == "y") {
      if (ycol) throw InputError("CSV header has more than one 'y' column");
      ycol = c;
    } else {
      t.names.push_back(header[c]);
    }
  }
  t.columns.resize(t.names.size());
  if (ycol) t.labels.emplace();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw InputError("line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                       " fields, header has " + std::to_string(header.size()));
    std::size_t f = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = detail::parse_cell(cells[c], lineno, header[c]);
      if (ycol && c == *ycol)
        t.labels->push_back(v);
      else
        t.columns[f++].push_back(v);
    }
  }
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in);
}

inline std::string format_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes features then `y`, full precision.
inline void write_csv(std::ostream& out, const DesignMatrix& data) {
  for (const auto& nm : data.feature_names()) out << nm << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.p(); ++j) out << format_cell(data.at(i, j)) << ',';
    out << (data.y()[i] > 0 ? "1" : "-1") << '\n';
  }
}

}  // namespace fastsparse

#endif  // FASTSPARSE_CSV_HPP
