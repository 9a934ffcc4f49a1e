#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pll {

/// Shortest decimal string that round-trips the double (printf %.17g).
std::string format_double(double v);

/// CSV convention used by every emitter: optional leading '#' comment lines
/// (full config), one header row, comma separators, '.' decimal point, LF
/// line endings, floats at 17 significant digits.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

  double cell_as_double(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable load_csv(const std::filesystem::path& path);

}  // namespace pll
