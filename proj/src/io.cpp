#include "kplate/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kplate {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {"dofV",     "exact_err", "eta_eq",   "eta_nonconf", "eta_osc",
                                                "eta_mean", "eta_jump",  "eff_eq",   "eff"};
  return cols;
}

std::vector<double> report_row(const ErrorReport& r) {
  return {static_cast<double>(r.dofs), r.exact_err, r.eta_eq, r.eta_nonconf, r.eta_osc,
          r.eta_mean,                  r.eta_jump,  r.eff_eq(), r.eff()};
}

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

void write_csv(std::ostream& os, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty input");
  t.header = split(line, ',');
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') throw std::runtime_error("read_csv: bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw std::runtime_error("read_csv: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is);
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_csv(os, table);
}

CsvTable report_table(const std::vector<ErrorReport>& reports) {
  CsvTable t;
  t.header = report_columns();
  for (const auto& r : reports) t.rows.push_back(report_row(r));
  return t;
}

void write_convergence_svg(std::ostream& os, const CsvTable& table, const std::string& xcolumn,
                           const std::vector<std::string>& ycolumns, const std::string& title) {
  constexpr double W = 720, H = 480, L = 80, R = 170, T = 40, B = 60;
  const int xc = table.column(xcolumn);
  if (xc < 0) throw std::invalid_argument("write_convergence_svg: unknown column " + xcolumn);
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  double xmin = std::numeric_limits<double>::max(), xmax = 0, ymin = xmin, ymax = 0;
  for (const auto& row : table.rows) {
    if (!ok(row[xc])) continue;
    xmin = std::min(xmin, row[xc]);
    xmax = std::max(xmax, row[xc]);
    for (const auto& name : ycolumns) {
      const int c = table.column(name);
      if (c < 0 || !ok(row[c])) continue;
      ymin = std::min(ymin, row[c]);
      ymax = std::max(ymax, row[c]);
    }
  }
  if (xmax <= 0 || ymax <= 0) {
    xmin = ymin = 1;
    xmax = ymax = 10;
  }
  const double lx0 = std::floor(std::log10(xmin)), lx1 = std::max(lx0 + 1, std::ceil(std::log10(xmax)));
  const double ly0 = std::floor(std::log10(ymin)), ly1 = std::max(ly0 + 1, std::ceil(std::log10(ymax)));
  auto px = [&](double x) { return L + (std::log10(x) - lx0) / (lx1 - lx0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (std::log10(y) - ly0) / (ly1 - ly0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  os << buf;
  for (int d = static_cast<int>(lx0); d <= static_cast<int>(lx1); ++d) {
    const double x = px(std::pow(10.0, d));
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"#ddd\"/>"
                  "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\" font-size=\"12\">1e%d</text>\n",
                  x, T, x, H - B, x, H - B + 18, d);
    os << buf;
  }
  for (int d = static_cast<int>(ly0); d <= static_cast<int>(ly1); ++d) {
    const double y = py(std::pow(10.0, d));
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"#ddd\"/>"
                  "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\" font-size=\"12\">1e%d</text>\n",
                  L, y, W - R, y, L - 6, y + 4, d);
    os << buf;
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << xcolumn << "</text>\n";
  int series = 0;
  for (const auto& name : ycolumns) {
    const int c = table.column(name);
    if (c < 0) continue;
    const char* color = colors[series % 7];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& row : table.rows) {
      if (!ok(row[xc]) || !ok(row[c])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(row[xc]), py(row[c]));
      os << buf;
    }
    os << "\"/>\n";
    const double ly = T + 16 + 20 * series;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%g\" y=\"%g\" font-size=\"12\">%s</text>\n",
                  W - R + 12, ly, W - R + 36, ly, color, W - R + 42, ly + 4, name.c_str());
    os << buf;
    ++series;
  }
  os << "</svg>\n";
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "command=" << command << '\n';
  os << "case=" << case_name << '\n';
  os << "method=" << method << '\n';
  os << "k=" << k << '\n';
  os << "alpha0=";
  for (std::size_t i = 0; i < alpha0.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", alpha0[i]);
    os << (i ? "," : "") << buf;
  }
  os << '\n';
  os << "n=" << n << '\n';
  os << "mesh=" << mesh_file << '\n';
  os << "levels=" << levels << '\n';
  os << "budget=" << budget << '\n';
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", theta);
  os << "theta=" << buf << '\n';
  os << "out=" << out << '\n';
  os << "check=" << (check ? 1 : 0) << '\n';
  os << "seed=" << seed << '\n';
  return os.str();
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "command") c.command = val;
      else if (key == "case") c.case_name = val;
      else if (key == "method") c.method = val;
      else if (key == "k") c.k = std::stoi(val);
      else if (key == "alpha0") {
        c.alpha0.clear();
        if (!val.empty())
          for (const auto& s : split(val, ',')) c.alpha0.push_back(std::stod(s));
      } else if (key == "n") c.n = std::stoi(val);
      else if (key == "mesh") c.mesh_file = val;
      else if (key == "levels") c.levels = std::stoi(val);
      else if (key == "budget") c.budget = std::stoi(val);
      else if (key == "theta") c.theta = std::stod(val);
      else if (key == "out") c.out = val;
      else if (key == "check") c.check = val == "1" || val == "true";
      else if (key == "seed") c.seed = static_cast<unsigned>(std::stoul(val));
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const std::invalid_argument*>(&e) && std::string(e.what()).rfind("config:", 0) == 0) throw;
      throw std::invalid_argument("config: bad value for '" + key + "'");
    }
  }
  return c;
}

}  // namespace kplate
