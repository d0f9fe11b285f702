#include "qqcm/csv.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qqcm/errors.hpp"

namespace qqcm {

std::string format_number(double value) {
  if (value == 0.0) {
    return "0";  // folds -0
  }
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    throw NumericalError("format_number: to_chars failed");
  }
  return std::string(buf.data(), ptr);
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  std::string line;
  bool first = true;
  for (auto n : names) append(line, first, n);
  line.push_back('\n');
  write(line);
}

void CsvWriter::header(const std::vector<std::string>& names) {
  std::string line;
  bool first = true;
  for (const auto& n : names) append(line, first, n);
  line.push_back('\n');
  write(line);
}

void CsvWriter::write(const std::string& line) {
  os_.write(line.data(), static_cast<std::streamsize>(line.size()));
}

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable parse_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line) || line.empty()) {
    throw ArgumentError("csv: missing header row");
  }
  table.columns = split(line);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.columns.size()) {
      throw ArgumentError("csv: line " + std::to_string(line_no) + " has " +
                          std::to_string(cells.size()) + " fields, expected " +
                          std::to_string(table.columns.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc{} || ptr != c.data() + c.size()) {
        throw ArgumentError("csv: line " + std::to_string(line_no) + ": not a number: '" + c + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ArgumentError("cannot open " + path);
  }
  return parse_csv(in);
}

}  // namespace qqcm
