#pragma once

#include <string>

#include "qqcm/csv.hpp"

namespace qqcm {

enum class PlotKind { Auto, Sweep, Trajectory, Lindley, Cdf, Queue };

PlotKind plot_kind_from_string(const std::string& s);

/// Picks the kind from the header of a CSV written by this package.
PlotKind detect_plot_kind(const CsvTable& table);

/// Static SVG line plot of the table. Throws ArgumentError if the table has no
/// data rows or lacks the columns of the requested kind.
std::string render_svg(const CsvTable& table, PlotKind kind);

/// Reads csv_path, renders it and writes svg_path. Nothing is written on error.
void cmd_plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path);

}  // namespace qqcm
