#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace shrinkage {

/// Full-precision text for a double; NaN (the missing-value marker) prints
/// as "nan" and round-trips through parse_real.
std::string format_real(double v);
double parse_real(const std::string& text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Reads the first column of a one-column CSV; a non-numeric first line is
/// treated as a header and skipped.
std::vector<double> read_column_csv(const std::filesystem::path& path);

/// A rectangular grid of named rows and columns, used for summary output.
struct Grid {
    std::string corner_label;  // top-left header cell
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<double>> cells;  // row-major, row_labels x col_labels
};

void write_grid_csv(const std::filesystem::path& path, const Grid& grid);
void write_grid_markdown(const std::filesystem::path& path, const Grid& grid);
std::string grid_to_markdown(const Grid& grid);

/// Line-chart series sharing a common x axis.
struct Series {
    std::string label;
    std::vector<double> y;
};

void write_series_csv(const std::filesystem::path& path, const std::string& x_label,
                      const std::vector<double>& x, const std::vector<Series>& series);

/// Minimal self-contained SVG line chart (one polyline per series).
void write_svg_lines(const std::filesystem::path& path, const std::string& title,
                     const std::vector<double>& x, const std::vector<Series>& series);

}  // namespace shrinkage
