#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "cli.hpp"
#include "kplate/io.hpp"

namespace fs = std::filesystem;
using namespace kplate;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kplate_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_quiet(const RunConfig& c) {
  std::ostringstream log, err;
  return cli::run(c, log, err);
}

int tool(const std::string& args) {
  const std::string cmd = std::string(KPLATE_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, SolveWritesOneFiniteRow) {
  RunConfig c;
  c.command = "solve";
  c.case_name = "smooth";
  c.k = 2;
  c.n = 4;
  c.out = scratch("solve").string();
  ASSERT_EQ(run_quiet(c), cli::kOk);
  const CsvTable t = read_csv_file((fs::path(c.out) / "report.csv").string());
  EXPECT_EQ(t.header, report_columns());
  ASSERT_EQ(t.rows.size(), 1u);
  for (double v : t.rows[0]) EXPECT_TRUE(std::isfinite(v));
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "convergence.svg"));
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "mesh_L0.txt"));
  EXPECT_EQ(RunConfig::parse(slurp(fs::path(c.out) / "config.txt")), c);
}

TEST(Cli, AdaptiveRunKeepsTheBound) {
  const fs::path out = scratch("adapt");
  ASSERT_EQ(tool("adapt --case lshape --method ipdg --k 2 --levels 6 --check --out " + out.string()), cli::kOk);
  const CsvTable h = read_csv_file((out / "history.csv").string());
  ASSERT_EQ(h.rows.size(), 6u);
  const int eff = h.column("eff"), dofs = h.column("dofV");
  ASSERT_GE(eff, 0);
  for (std::size_t i = 0; i < h.rows.size(); ++i) {
    EXPECT_GE(h.rows[i][eff], 1.0);
    if (i > 0) {
      EXPECT_GT(h.rows[i][dofs], h.rows[i - 1][dofs]);
    }
    EXPECT_TRUE(fs::exists(out / ("mesh_L" + std::to_string(i) + ".txt")));
  }
}

TEST(Cli, PenaltySweepTable) {
  const fs::path out = scratch("sweep");
  ASSERT_EQ(tool("sweep --case timoshenko --alpha0 0.25,0.5,1,2,4,8 --k 2 --n 16 --out " + out.string()), cli::kOk);
  const CsvTable t = read_csv_file((out / "sweep.csv").string());
  ASSERT_EQ(t.rows.size(), 6u);
  const int a = t.column("alpha0"), j = t.column("eta_jump");
  const double want[] = {0.25, 0.5, 1, 2, 4, 8};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(t.rows[i][a], want[i]);
    if (i > 0) {
      EXPECT_LT(t.rows[i][j], t.rows[i - 1][j]);
    }
  }
}

TEST(Cli, IdenticalRunsGiveIdenticalCsv) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string args = "convergence --case smooth --k 3 --n 2 --levels 3 --seed 7 --out ";
  ASSERT_EQ(tool(args + a.string()), cli::kOk);
  ASSERT_EQ(tool(args + b.string()), cli::kOk);
  for (const char* f : {"history.csv", "report.csv"}) {
    const std::string sa = slurp(a / f);
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, slurp(b / f)) << f;
  }
}

TEST(Cli, ExitCodes) {
  const fs::path out = scratch("codes"), clamped = scratch("codes_mesh");
  EXPECT_EQ(tool("solve --case smooth --n 2 --out " + clamped.string()), cli::kOk);
  EXPECT_EQ(tool("solve --case circle --out " + out.string()), cli::kUsage);
  EXPECT_EQ(tool("solve --case smooth --method fem --out " + out.string()), cli::kUsage);
  EXPECT_EQ(tool("solve --bogus"), cli::kUsage);
  EXPECT_EQ(tool("explode --case smooth --out " + out.string()), cli::kUsage);
  // Far below the stability threshold the penalty study breaks its own trend.
  EXPECT_EQ(tool("sweep --case timoshenko --n 4 --alpha0 0.01,0.02 --check --out " + out.string()), cli::kCheckFailed);

  // A plate that is free all around has a singular stiffness matrix.
  std::string mesh = slurp(clamped / "mesh_L0.txt");
  for (std::size_t p = mesh.find(" C\n"); p != std::string::npos; p = mesh.find(" C\n", p)) mesh[p + 1] = 'F';
  {
    std::ofstream os(out / "free.txt");
    os << mesh;
  }
  EXPECT_EQ(tool("solve --case smooth --mesh " + (out / "free.txt").string() + " --out " + out.string()),
            cli::kSolverFailure);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path out = scratch("config");
  fs::create_directories(out);
  {
    std::ofstream os(out / "run.cfg");
    os << "# smoke run\ncommand=solve\ncase=lshape\nk=3\nn=5\nout=" << (out / "ignored").string() << '\n';
  }
  ASSERT_EQ(tool("--config " + (out / "run.cfg").string() + " --n 2 --out " + (out / "used").string()), cli::kOk);
  const RunConfig c = RunConfig::parse(slurp(out / "used" / "config.txt"));
  EXPECT_EQ(c.case_name, "lshape");
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.n, 2);
  EXPECT_FALSE(fs::exists(out / "ignored"));
}

TEST(RunConfigText, RoundTrips) {
  RunConfig c;
  c.command = "sweep";
  c.case_name = "timoshenko";
  c.method = "hhj";
  c.k = 3;
  c.alpha0 = {0.25, 1.0 / 3.0, 8.0};
  c.n = 12;
  c.mesh_file = "meshes/a.txt";
  c.levels = 9;
  c.budget = 12345;
  c.theta = 0.3;
  c.out = "results/x";
  c.check = true;
  c.seed = 42;
  EXPECT_EQ(RunConfig::parse(c.to_text()), c);
  EXPECT_EQ(RunConfig::parse(RunConfig{}.to_text()), RunConfig{});
  EXPECT_THROW(RunConfig::parse("colour=red\n"), std::invalid_argument);
  EXPECT_THROW(RunConfig::parse("k\n"), std::invalid_argument);
}

TEST(Csv, RoundTrips) {
  CsvTable t;
  t.header = report_columns();
  t.rows = {std::vector<double>(t.header.size(), 1.0 / 3.0), std::vector<double>(t.header.size(), -2.5e-7)};
  t.rows[1][3] = std::nan("");
  std::ostringstream a;
  write_csv(a, t);
  std::istringstream in(a.str());
  const CsvTable back = read_csv(in);
  EXPECT_EQ(back.header, t.header);
  ASSERT_EQ(back.rows.size(), 2u);
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    EXPECT_NEAR(back.rows[0][i], 1.0 / 3.0, 1e-11);
    if (i != 3) {
      EXPECT_DOUBLE_EQ(back.rows[1][i], -2.5e-7);
    }
  }
  EXPECT_TRUE(std::isnan(back.rows[1][3]));
  std::ostringstream b;
  write_csv(b, back);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.column("eff"), static_cast<int>(t.header.size()) - 1);
  EXPECT_EQ(back.column("missing"), -1);
}

TEST(Csv, ReportColumnsFollowTheTableLayout) {
  EXPECT_EQ(report_columns(), (std::vector<std::string>{"dofV", "exact_err", "eta_eq", "eta_nonconf", "eta_osc",
                                                        "eta_mean", "eta_jump", "eff_eq", "eff"}));
}
