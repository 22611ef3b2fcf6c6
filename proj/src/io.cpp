#include "shrinkage/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shrinkage {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

// Splits a csv line, honoring double-quoted cells (quotes escaped by doubling).
std::vector<std::string> split_line(const std::string& line, char sep = ',') {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == sep) {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string quote_cell(const std::string& cell) {
    if (cell.find_first_of(",\"") == std::string::npos) return cell;
    std::string out = "\"";
    for (char ch : cell) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_real(const std::string& text) {
    if (text == "nan" || text.empty()) return std::numeric_limits<double>::quiet_NaN();
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("bad numeric cell: '" + text + "'");
    return v;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    auto out = open_out(path);
    for (size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << quote_cell(table.header[i]);
    out << '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_real(row[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());
    table.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_real(c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<double> read_column_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<double> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        try {
            values.push_back(parse_real(cells.at(0)));
        } catch (const std::exception&) {
            if (first) {
                first = false;
                continue;  // header line
            }
            throw std::runtime_error("bad numeric line in " + path.string() + ": '" + line + "'");
        }
        first = false;
    }
    if (values.empty()) throw std::runtime_error("no data rows in " + path.string());
    return values;
}

void write_grid_csv(const std::filesystem::path& path, const Grid& grid) {
    auto out = open_out(path);
    out << quote_cell(grid.corner_label);
    for (const auto& c : grid.col_labels) out << ',' << quote_cell(c);
    out << '\n';
    for (size_t r = 0; r < grid.row_labels.size(); ++r) {
        out << quote_cell(grid.row_labels[r]);
        for (double v : grid.cells[r]) out << ',' << format_real(v);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string grid_to_markdown(const Grid& grid) {
    const size_t ncol = grid.col_labels.size();
    std::vector<std::vector<std::string>> text(grid.row_labels.size());
    std::vector<size_t> width(ncol + 1, 0);
    width[0] = grid.corner_label.size();
    for (size_t r = 0; r < grid.row_labels.size(); ++r) {
        width[0] = std::max(width[0], grid.row_labels[r].size());
        text[r].resize(ncol);
        for (size_t c = 0; c < ncol; ++c) {
            char buf[32];
            const double v = grid.cells[r][c];
            if (std::isnan(v))
                text[r][c] = "-";
            else {
                std::snprintf(buf, sizeof(buf), "%.4g", v);
                text[r][c] = buf;
            }
        }
    }
    for (size_t c = 0; c < ncol; ++c) {
        width[c + 1] = grid.col_labels[c].size();
        for (size_t r = 0; r < grid.row_labels.size(); ++r)
            width[c + 1] = std::max(width[c + 1], text[r][c].size());
    }
    auto pad = [](const std::string& s, size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    std::string md;
    md += "| " + pad(grid.corner_label, width[0]);
    for (size_t c = 0; c < ncol; ++c) md += " | " + pad(grid.col_labels[c], width[c + 1]);
    md += " |\n";
    md += "| " + std::string(width[0], '-');
    for (size_t c = 0; c < ncol; ++c) md += " | " + std::string(width[c + 1], '-');
    md += " |\n";
    for (size_t r = 0; r < grid.row_labels.size(); ++r) {
        md += "| " + pad(grid.row_labels[r], width[0]);
        for (size_t c = 0; c < ncol; ++c) md += " | " + pad(text[r][c], width[c + 1]);
        md += " |\n";
    }
    return md;
}

void write_grid_markdown(const std::filesystem::path& path, const Grid& grid) {
    auto out = open_out(path);
    out << grid_to_markdown(grid);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_series_csv(const std::filesystem::path& path, const std::string& x_label,
                      const std::vector<double>& x, const std::vector<Series>& series) {
    CsvTable table;
    table.header.push_back(x_label);
    for (const auto& s : series) table.header.push_back(s.label);
    for (size_t i = 0; i < x.size(); ++i) {
        std::vector<double> row;
        row.push_back(x[i]);
        for (const auto& s : series) row.push_back(i < s.y.size() ? s.y[i] : std::nan(""));
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

void write_svg_lines(const std::filesystem::path& path, const std::string& title,
                     const std::vector<double>& x, const std::vector<Series>& series) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const double W = 720, H = 440, L = 70, R = 20, T = 40, B = 50;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (double v : x) {
        if (!std::isfinite(v)) continue;
        if (!any) { xmin = xmax = v; }
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
        any = true;
    }
    bool any_y = false;
    for (const auto& s : series)
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            if (!any_y) { ymin = ymax = v; }
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
            any_y = true;
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto sx = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
    auto sy = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };

    auto out = open_out(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "  <rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";
    out << "  <line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
        << H - B << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    char buf[64];
    for (int i = 0; i <= 4; ++i) {
        const double vx = xmin + (xmax - xmin) * i / 4.0;
        const double vy = ymin + (ymax - ymin) * i / 4.0;
        std::snprintf(buf, sizeof(buf), "%.4g", vx);
        out << "  <text x=\"" << sx(vx) << "\" y=\"" << H - B + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << buf
            << "</text>\n";
        std::snprintf(buf, sizeof(buf), "%.4g", vy);
        out << "  <text x=\"" << L - 6 << "\" y=\"" << sy(vy) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
            << "</text>\n";
    }
    for (size_t k = 0; k < series.size(); ++k) {
        const char* color = palette[k % 8];
        out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < x.size() && i < series[k].y.size(); ++i) {
            if (!std::isfinite(series[k].y[i])) continue;
            out << sx(x[i]) << ',' << sy(series[k].y[i]) << ' ';
        }
        out << "\"/>\n";
        out << "  <text x=\"" << W - R - 4 << "\" y=\"" << T + 16 + 14 * static_cast<double>(k)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
            << color << "\">" << series[k].label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace shrinkage
