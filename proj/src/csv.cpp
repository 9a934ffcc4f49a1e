#include "pll/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pll {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::ostringstream os;
  for (const std::string& c : comments) os << "# " << c << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) os << ',';
    os << columns[i];
  }
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << "\n";
  }
  return os.str();
}

void CsvTable::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os.good()) throw std::runtime_error("csv: cannot open " + path.string());
  os << to_string();
  if (!os.good()) throw std::runtime_error("csv: write failed for " + path.string());
}

double CsvTable::cell_as_double(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv: non-numeric cell '" + s + "'");
  }
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream is(text);
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t start = 1;
      if (start < line.size() && line[start] == ' ') ++start;
      table.comments.push_back(line.substr(start));
      continue;
    }
    if (!have_header) {
      table.columns = split_commas(line);
      have_header = true;
    } else {
      auto cells = split_commas(line);
      if (cells.size() != table.columns.size()) {
        throw std::runtime_error("csv: row width " + std::to_string(cells.size()) +
                                 " does not match header width " +
                                 std::to_string(table.columns.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw std::runtime_error("csv: missing header row");
  return table;
}

CsvTable load_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is.good()) throw std::runtime_error("csv: cannot open " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return parse_csv(os.str());
}

}  // namespace pll
