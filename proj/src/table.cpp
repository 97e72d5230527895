#include "bingeo/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bingeo {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("Table: row width does not match header");
  rows.push_back(std::move(row));
}

int Table::col_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : int(it - columns.begin());
}

void emit_csv(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  for (size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << "\n";
  char buf[40];
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream rs(line);
    std::vector<double> row;
    while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
    t.add_row(std::move(row));
  }
  return t;
}

namespace {

struct AxisMap {
  double lo = 0, hi = 1, p0 = 0, p1 = 1;
  double operator()(double v) const {
    const double f = (hi > lo) ? (v - lo) / (hi - lo) : 0.5;
    return p0 + f * (p1 - p0);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const char* kSeriesColors[] = {"#1f6fb2", "#d95319", "#2a9d4e",
                               "#7d3fb2", "#c2a500", "#444444"};

}  // namespace

void emit_plot(const Table& table, const PlotStyle& style,
               const std::string& path) {
  const int xi = table.col_index(style.x_column);
  if (xi < 0)
    throw std::invalid_argument("emit_plot: missing x column " + style.x_column);
  if (style.y_columns.empty())
    throw std::invalid_argument("emit_plot: no y columns");
  std::vector<int> yis;
  for (const auto& name : style.y_columns) {
    const int yi = table.col_index(name);
    if (yi < 0) throw std::invalid_argument("emit_plot: missing y column " + name);
    yis.push_back(yi);
  }
  int si = -1;
  if (style.kind == PlotStyle::Kind::errorbar) {
    si = table.col_index(style.stddev_column);
    if (si < 0)
      throw std::invalid_argument(
          "emit_plot: errorbar style needs a stddev column");
  }

  const double w = 640, h = 440, ml = 70, mr = 20, mt = 36, mb = 52;
  AxisMap xm, ym;
  xm.p0 = ml;
  xm.p1 = w - mr;
  ym.p0 = h - mb;  // SVG y grows downward
  ym.p1 = mt;
  bool first = true;
  for (const auto& row : table.rows) {
    const double x = row[xi];
    if (first) {
      xm.lo = xm.hi = x;
    }
    xm.lo = std::min(xm.lo, x);
    xm.hi = std::max(xm.hi, x);
    for (size_t s = 0; s < yis.size(); ++s) {
      double y = row[yis[s]];
      double e = (si >= 0) ? row[si] : 0.0;
      if (first) {
        ym.lo = y - e;
        ym.hi = y + e;
        first = false;
      }
      ym.lo = std::min(ym.lo, y - e);
      ym.hi = std::max(ym.hi, y + e);
    }
  }
  if (first) {  // no rows: draw empty axes
    xm.lo = 0;
    xm.hi = 1;
    ym.lo = 0;
    ym.hi = 1;
  }
  if (ym.hi == ym.lo) {
    ym.lo -= 0.5;
    ym.hi += 0.5;
  }
  const double ypad = 0.06 * (ym.hi - ym.lo);
  ym.lo -= ypad;
  ym.hi += ypad;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
      << h << "' viewBox='0 0 " << w << " " << h << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  // axes
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << h - mb << "' stroke='black'/>\n"
      << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
      << "' y2='" << h - mb << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xm.lo + (xm.hi - xm.lo) * i / 5.0;
    const double fy = ym.lo + (ym.hi - ym.lo) * i / 5.0;
    out << "<text x='" << xm(fx) << "' y='" << h - mb + 18
        << "' font-size='11' text-anchor='middle'>" << fmt(fx) << "</text>\n"
        << "<text x='" << ml - 6 << "' y='" << ym(fy) + 4
        << "' font-size='11' text-anchor='end'>" << fmt(fy) << "</text>\n"
        << "<line x1='" << xm(fx) << "' y1='" << h - mb << "' x2='" << xm(fx)
        << "' y2='" << h - mb + 4 << "' stroke='black'/>\n"
        << "<line x1='" << ml - 4 << "' y1='" << ym(fy) << "' x2='" << ml
        << "' y2='" << ym(fy) << "' stroke='black'/>\n";
  }
  out << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 14
      << "' font-size='13' text-anchor='middle'>" << style.x_label << "</text>\n"
      << "<text x='16' y='" << (mt + h - mb) / 2
      << "' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
      << (mt + h - mb) / 2 << ")'>" << style.y_label << "</text>\n"
      << "<text x='" << w / 2 << "' y='20' font-size='14' text-anchor='middle'>"
      << style.title << "</text>\n";

  for (size_t s = 0; s < yis.size(); ++s) {
    const char* color = kSeriesColors[s % 6];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.6' points='";
    for (const auto& row : table.rows)
      out << xm(row[xi]) << "," << ym(row[yis[s]]) << " ";
    out << "'/>\n";
    if (si >= 0) {
      for (const auto& row : table.rows) {
        const double x = xm(row[xi]);
        const double y0 = ym(row[yis[s]] - row[si]);
        const double y1 = ym(row[yis[s]] + row[si]);
        out << "<line x1='" << x << "' y1='" << y0 << "' x2='" << x << "' y2='"
            << y1 << "' stroke='" << color << "'/>\n"
            << "<line x1='" << x - 3 << "' y1='" << y0 << "' x2='" << x + 3
            << "' y2='" << y0 << "' stroke='" << color << "'/>\n"
            << "<line x1='" << x - 3 << "' y1='" << y1 << "' x2='" << x + 3
            << "' y2='" << y1 << "' stroke='" << color << "'/>\n";
      }
    }
    // legend
    const double ly = mt + 16 + 16 * double(s);
    out << "<line x1='" << w - mr - 150 << "' y1='" << ly << "' x2='"
        << w - mr - 122 << "' y2='" << ly << "' stroke='" << color
        << "' stroke-width='2'/>\n"
        << "<text x='" << w - mr - 116 << "' y='" << ly + 4
        << "' font-size='11'>" << table.columns[yis[s]] << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("emit_plot: write failed for " + path);
}

}  // namespace bingeo
