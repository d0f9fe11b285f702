#pragma once

#include <charconv>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qqcm {

/// Shortest round-trip decimal representation ('.' separator, locale independent).
std::string format_number(double value);

/// Comma-separated writer with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> names);
  void header(const std::vector<std::string>& names);

  template <class... Fields>
  void row(const Fields&... fields) {
    std::string line;
    bool first = true;
    (append(line, first, fields), ...);
    line.push_back('\n');
    write(line);
  }

 private:
  static void sep(std::string& line, bool& first) {
    if (!first) line.push_back(',');
    first = false;
  }
  template <std::integral I>
  static void append(std::string& line, bool& first, I value) {
    sep(line, first);
    line += std::to_string(value);
  }
  static void append(std::string& line, bool& first, double value) {
    sep(line, first);
    line += format_number(value);
  }
  static void append(std::string& line, bool& first, std::string_view value) {
    sep(line, first);
    line += value;
  }
  static void append(std::string& line, bool& first, const std::string& value) {
    append(line, first, std::string_view(value));
  }
  static void append(std::string& line, bool& first, const char* value) {
    append(line, first, std::string_view(value));
  }

  void write(const std::string& line);

  std::ostream& os_;
};

/// Parsed numeric CSV: header names plus rows of doubles.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column or -1.
  int column(std::string_view name) const;
};

/// Reads a numeric CSV with a header row. Throws ArgumentError on malformed input.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& is);

}  // namespace qqcm
