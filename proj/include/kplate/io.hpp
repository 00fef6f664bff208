#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kplate/estimator.hpp"

namespace kplate {

/// Report columns, in order.
const std::vector<std::string>& report_columns();
std::vector<double> report_row(const ErrorReport& report);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

/// Numbers are written as %.10e; NaN as "nan".
void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);
void write_csv_file(const std::string& path, const CsvTable& table);

CsvTable report_table(const std::vector<ErrorReport>& reports);

/// Log-log plot of several columns against the first one.
void write_convergence_svg(std::ostream& os, const CsvTable& table, const std::string& xcolumn,
                           const std::vector<std::string>& ycolumns, const std::string& title);

/// Run configuration with a key=value text form.
struct RunConfig {
  std::string command = "solve";
  std::string case_name = "smooth";
  std::string method = "ipdg";
  int k = 2;
  std::vector<double> alpha0;  // empty: case default
  int n = 4;
  std::string mesh_file;  // overrides the generator when non-empty
  int levels = 6;
  int budget = 50000;
  double theta = 0.25;
  std::string out = "out";
  bool check = false;
  unsigned seed = 0;

  std::string to_text() const;
  static RunConfig parse(const std::string& text);

  bool operator==(const RunConfig&) const = default;
};

}  // namespace kplate
