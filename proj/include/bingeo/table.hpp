#pragma once

#include <string>
#include <vector>

namespace bingeo {

// Column-labelled numeric table; the unit is part of the column name
// (t_us, F_avg, epsilon, ...).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  int col_index(const std::string& name) const;  // -1 if absent
};

// Writes the table with a header row, 12 significant digits and LF line
// endings. Deterministic for identical input.
void emit_csv(const Table& table, const std::string& path);
Table read_csv(const std::string& path);

struct PlotStyle {
  enum class Kind { line, errorbar } kind = Kind::line;
  std::string title;
  std::string x_label;
  std::string y_label;
  // Column selection: x column plus one or more y series; errorbar style
  // additionally needs stddev_column.
  std::string x_column;
  std::vector<std::string> y_columns;
  std::string stddev_column;
};

// Renders a simple SVG line or errorbar plot. Plots are a convenience; the
// CSVs are the contract.
void emit_plot(const Table& table, const PlotStyle& style,
               const std::string& path);

}  // namespace bingeo
