#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "kplate/adaptivity.hpp"
#include "kplate/benchmarks.hpp"
#include "kplate/equilibration.hpp"
#include "kplate/ipdg.hpp"

namespace kplate::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Method parse_method(const std::string& s) {
  if (s == "ipdg") return Method::IPDG;
  if (s == "hhj") return Method::HHJ;
  throw UsageError("unknown method '" + s + "' (expected ipdg or hhj)");
}

BenchmarkCase parse_case(const std::string& s) {
  try {
    return benchmark_by_name(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(e.what()) + " (expected lshape, smooth or timoshenko)");
  }
}

// Acceptance properties of a single level; returns human-readable failures.
std::vector<std::string> level_failures(const LevelResult& r) {
  std::vector<std::string> out;
  const ErrorReport& rep = r.report;
  if (!(r.equilibration_residual <= r.equilibration_tolerance)) out.push_back("equilibration residual above tolerance");
  if (rep.has_conforming) {
    if (!(rep.eta_mean <= rep.eta_nonconf + 0.5 * rep.eta_eq + 1e-12)) out.push_back("eta_mean exceeds triangle bound");
    if (!(rep.improved_bound() <= rep.basic_bound() + 1e-12)) out.push_back("improved bound exceeds basic bound");
    if (rep.has_exact && !(rep.eff() >= 1.0)) out.push_back("bound below exact error (eff < 1)");
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void write_mesh_snapshot(const fs::path& dir, int level, const Mesh& mesh) {
  std::ofstream os(dir / ("mesh_L" + std::to_string(level) + ".txt"), std::ios::binary);
  if (!os) throw std::runtime_error("cannot write mesh snapshot");
  write_mesh(os, mesh);
}

void write_svg(const fs::path& path, const CsvTable& table, const std::string& x, const std::string& title) {
  std::vector<std::string> ys;
  for (const auto& c : {"exact_err", "eta_eq", "eta_nonconf", "eta_mean", "eta_jump", "eta_osc"}) ys.push_back(c);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_convergence_svg(os, table, x, ys, title);
}

void write_indicators(const fs::path& path, const ErrorReport& r) {
  CsvTable t;
  t.header = {"element", "eta_eq", "eta_mean", "eta_nonconf", "eta_osc"};
  auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : std::nan(""); };
  for (int i = 0; i < r.elements; ++i) {
    t.rows.push_back({static_cast<double>(i), at(r.eta_eq_T, i), at(r.eta_mean_T, i), at(r.eta_nonconf_T, i),
                      at(r.eta_osc_T, i)});
  }
  write_csv_file(path.string(), t);
}

std::string summary(const LevelResult& r) {
  const ErrorReport& e = r.report;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "dofs=%d elements=%d err=%.4e eta_eq=%.4e eta_nonconf=%.4e eta_mean=%.4e eta_jump=%.4e "
                "eta_osc=%.4e eff=%.3f",
                e.dofs, e.elements, e.exact_err, e.eta_eq, e.eta_nonconf, e.eta_mean, e.eta_jump, e.eta_osc, e.eff());
  return buf;
}

int report_check(const std::vector<std::string>& failures, std::ostream& log, std::ostream& err) {
  if (failures.empty()) {
    log << "check: PASS\n";
    return kOk;
  }
  for (const auto& f : failures) err << "check: FAIL " << f << '\n';
  return kCheckFailed;
}

int execute(const RunConfig& c, std::ostream& log, std::ostream& err) {
  const BenchmarkCase bench = parse_case(c.case_name);
  PipelineOptions opt;
  opt.method = parse_method(c.method);
  opt.k = c.k;
  if (c.k < 2) throw UsageError("k must be at least 2");
  if (c.command != "sweep" && c.alpha0.size() > 1) throw UsageError("several alpha0 values are only valid for sweep");
  if (!c.alpha0.empty()) opt.alpha0 = c.alpha0.front();

  MeshPtr mesh = c.mesh_file.empty() ? std::make_shared<const Mesh>(bench.mesh(c.n))
                                     : std::make_shared<const Mesh>(read_mesh_file(c.mesh_file));
  const fs::path out(c.out);
  fs::create_directories(out);
  write_text(out / "config.txt", c.to_text());

  std::vector<std::string> failures;
  if (c.command == "solve" || c.command == "estimate") {
    const LevelResult r = run_level(bench, mesh, opt);
    log << summary(r) << '\n';
    write_csv_file((out / "report.csv").string(), report_table({r.report}));
    write_mesh_snapshot(out, 0, *mesh);
    write_svg(out / "convergence.svg", report_table({r.report}), "dofV", bench.name);
    if (c.command == "estimate") write_indicators(out / "indicators.csv", r.report);
    failures = level_failures(r);
  } else if (c.command == "adapt" || c.command == "convergence") {
    std::vector<LevelResult> levels;
    if (c.command == "adapt") {
      AdaptiveConfig ac;
      ac.theta = c.theta;
      ac.max_levels = c.levels;
      ac.dof_budget = c.budget;
      levels = adaptive_loop(bench, mesh, opt, ac);
    } else {
      levels = uniform_loop(bench, mesh, opt, c.levels);
    }
    std::vector<ErrorReport> reports;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      log << "level " << l << ": " << summary(levels[l]) << '\n';
      reports.push_back(levels[l].report);
      write_mesh_snapshot(out, static_cast<int>(l), *levels[l].mesh);
      for (const auto& f : level_failures(levels[l])) failures.push_back("level " + std::to_string(l) + ": " + f);
    }
    const CsvTable history = report_table(reports);
    write_csv_file((out / "history.csv").string(), history);
    write_csv_file((out / "report.csv").string(), report_table({reports.back()}));
    write_svg(out / "convergence.svg", history, "dofV", bench.name + " (" + c.command + ")");
  } else if (c.command == "sweep") {
    std::vector<double> a0s = c.alpha0;
    if (a0s.empty()) a0s = {0.25, 0.5, 1, 2, 4, 8};
    const std::vector<LevelResult> runs = alpha_sweep(bench, mesh, c.k, a0s, opt.method);
    CsvTable t;
    t.header = {"alpha0"};
    for (const auto& h : report_columns()) t.header.push_back(h);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      log << "alpha0=" << a0s[i] << ": " << summary(runs[i]) << '\n';
      std::vector<double> row = {a0s[i]};
      for (double v : report_row(runs[i].report)) row.push_back(v);
      t.rows.push_back(std::move(row));
      for (const auto& f : level_failures(runs[i])) failures.push_back("alpha0=" + std::to_string(a0s[i]) + ": " + f);
    }
    // The penalty study expects eta_jump to fall as alpha0 grows.
    const int jc = t.column("eta_jump");
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      if (a0s[i] > a0s[i - 1] && !(t.rows[i][jc] < t.rows[i - 1][jc])) failures.push_back("eta_jump not decreasing");
    }
    write_csv_file((out / "sweep.csv").string(), t);
    write_mesh_snapshot(out, 0, *mesh);
    write_svg(out / "convergence.svg", t, "alpha0", bench.name + " penalty sweep");
  } else {
    throw UsageError("unknown command '" + c.command + "'");
  }
  return c.check ? report_check(failures, log, err) : kOk;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    return execute(config, log, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kSolverFailure;
  } catch (const LevelError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const EquilibrationError& e) {
    err << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Kirchhoff plate solver with equilibrated a posteriori error bounds"};
  app.set_help_flag("--help", "Print this help message and exit");
  RunConfig c;
  std::string command, config_file, alpha0;
  app.add_option("command", command, "solve | estimate | adapt | sweep | convergence");
  auto* o_case = app.add_option("--case", c.case_name, "lshape | smooth | timoshenko");
  auto* o_method = app.add_option("--method", c.method, "ipdg | hhj");
  auto* o_k = app.add_option("--k", c.k, "polynomial order");
  auto* o_alpha = app.add_option("--alpha0", alpha0, "penalty factor(s), comma separated");
  auto* o_n = app.add_option("--n", c.n, "generator subdivisions");
  auto* o_mesh = app.add_option("--mesh", c.mesh_file, "mesh file (overrides --n)");
  auto* o_levels = app.add_option("--levels", c.levels, "number of levels");
  auto* o_budget = app.add_option("--budget", c.budget, "deflection dof budget for adapt");
  auto* o_theta = app.add_option("--theta", c.theta, "marking fraction");
  auto* o_out = app.add_option("--out", c.out, "output directory");
  auto* o_check = app.add_flag("--check", c.check, "verify acceptance properties");
  auto* o_seed = app.add_option("--seed", c.seed, "seed for randomized checks");
  app.add_option("--config", config_file, "key=value configuration file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  // Explicit flags override values from --config.
  RunConfig merged = c;
  if (!config_file.empty()) {
    std::ifstream is(config_file);
    if (!is) {
      std::cerr << "error: cannot open " << config_file << '\n';
      return kUsage;
    }
    std::stringstream ss;
    ss << is.rdbuf();
    try {
      merged = RunConfig::parse(ss.str());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    }
    if (*o_case) merged.case_name = c.case_name;
    if (*o_method) merged.method = c.method;
    if (*o_k) merged.k = c.k;
    if (*o_n) merged.n = c.n;
    if (*o_mesh) merged.mesh_file = c.mesh_file;
    if (*o_levels) merged.levels = c.levels;
    if (*o_budget) merged.budget = c.budget;
    if (*o_theta) merged.theta = c.theta;
    if (*o_out) merged.out = c.out;
    if (*o_check) merged.check = c.check;
    if (*o_seed) merged.seed = c.seed;
  }
  if (!command.empty()) merged.command = command;
  if (*o_alpha) {
    try {
      merged.alpha0 = RunConfig::parse("alpha0=" + alpha0).alpha0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    }
  }
  return run(merged, std::cout, std::cerr);
}

}  // namespace kplate::cli
