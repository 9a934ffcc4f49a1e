#pragma once

#include <filesystem>
#include <string>

#include "pll/csv.hpp"

namespace pll {

/// Renders a CSV table as a self-contained SVG line chart. Column schema:
/// the first column is the x axis; the remaining columns are either adjacent
/// pairs `<series>_mean`,`<series>_std` (drawn with error bars) or plain
/// series names (drawn as bare lines). A dangling `_mean`/`_std` column is a
/// schema error. Output bytes are a pure function of the table.
std::string render_line_chart(const CsvTable& table);

void emit_plot(const std::filesystem::path& csv_path,
               const std::filesystem::path& svg_path);

}  // namespace pll
