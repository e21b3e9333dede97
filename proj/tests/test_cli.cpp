#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "asdnk/cli/suite.hpp"
#include "asdnk/fields/grid.hpp"

using namespace asdnk;
namespace fs = std::filesystem;

namespace {

const std::string kCli = ASDNK_CLI_PATH;
const std::string kBundled = std::string(ASDNK_SOURCE_DIR) + "/fixtures/paper.cfg";

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args) {
  std::string cmd = kCli + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("asdnk_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_cfg(const fs::path& dir, const std::string& text) {
  fs::path p = dir / "case.cfg";
  std::ofstream(p) << text;
  return p;
}

cli::CheckConfig parse(const std::string& text) {
  std::istringstream in(text);
  return cli::parse_config(in, "t.cfg");
}

}  // namespace

TEST(Config, ParsesSections) {
  auto cfg = parse(
      "[suite]\nname = s\nseed = 3\nsamples = 7\n[tolerances]\nnk1 = 1e-3\n"
      "[fixture a]\nkind = nk\ntheta = x*y  # comment\nchecks = nk1, nk2\ndomain = x:0:1, y:-2:2\n");
  EXPECT_EQ(cfg.name, "s");
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.samples, 7u);
  EXPECT_EQ(cfg.tolerance("nk1"), 1e-3);
  EXPECT_EQ(cfg.tolerance("nk2"), 1e-10);
  const auto& f = cfg.fixture("a");
  EXPECT_EQ(*f.get("theta"), "x*y");
  EXPECT_EQ(f.checks, (std::vector<std::string>{"nk1", "nk2"}));
  ASSERT_EQ(f.domain.size(), 2u);
  EXPECT_EQ(f.domain[0].second.first, 0.0);
}

TEST(Config, DiagnosticsNameLineAndField) {
  auto msg = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(msg("[tolerances]\nnk1 = -1\n").find("t.cfg:2: 'nk1'"), std::string::npos);
  EXPECT_NE(msg("[fixture a]\nkind = nk\n\nchecks = bogus\n").find("t.cfg:4"), std::string::npos);
  EXPECT_NE(msg("[fixture a]\nkind = spline\nchecks = nk1\n").find("unknown kind"), std::string::npos);
  EXPECT_NE(msg("[nonsense]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(msg("[fixture a]\nkind = nk\ndomain = x:1:0\nchecks = nk1\n").find("empty interval"), std::string::npos);

  auto cfg = parse("[fixture a]\nkind = nk\ntheta = x +* y\nchecks = nk1\n");
  try {
    cli::build_fixture(cfg.fixture("a"), cfg.source);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("t.cfg:3: fixture 'a', key 'theta'"), std::string::npos) << e.what();
  }
  cfg = parse("[fixture a]\nkind = nk\ntheta = x\nchecks = heqn\n");
  EXPECT_THROW(cli::build_fixture(cfg.fixture("a"), cfg.source), ConfigError);
}

TEST(Config, ExpectInvalidTurnsChecksIntoControls) {
  auto cfg = parse("[fixture a]\nkind = ew\nu = x^2\nexpect = invalid\nchecks = ew\n");
  EXPECT_TRUE(cfg.fixture("a").checks.empty());
  EXPECT_EQ(cfg.fixture("a").controls, std::vector<std::string>{"ew"});
}

TEST(Suite, ToleranceScaleAndControls) {
  auto cfg = parse("[fixture a]\nkind = nk\ntheta = x^2*y^2\nchecks = nk1\ncontrols = nk2\n");
  cli::RunOptions opt;
  opt.serial = true;
  auto rep = cli::run_suite(cfg, opt);
  ASSERT_EQ(rep.results.size(), 2u);
  EXPECT_TRUE(rep.passed());
  opt.tolerance_scale = 1e6;  // control threshold 1e4 exceeds the residual
  rep = cli::run_suite(cfg, opt);
  EXPECT_FALSE(rep.results[1].passed);
  opt.tolerance_scale = 0.0;
  EXPECT_THROW(cli::run_suite(cfg, opt), ConfigError);
}

TEST(Suite, GeometryErrorFailsTheCheck) {
  // W_x = 2t changes sign on the default box
  auto cfg = parse("[fixture gh]\nkind = dkp\nH = 0\nW = y^2 + 2*x*t\nchecks = lindkp, ricci\n");
  auto rep = cli::run_suite(cfg, {std::nullopt, true, 1.0});
  ASSERT_EQ(rep.results.size(), 2u);
  EXPECT_TRUE(rep.results[0].passed);
  EXPECT_FALSE(rep.results[1].passed);
  EXPECT_NE(rep.results[1].error.find("changes sign"), std::string::npos);
  auto j = cli::report_json(rep);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["summary"]["failed"], 1);
  EXPECT_TRUE(j["checks"][1].contains("error"));
}

TEST(Cli, BundledConfigPasses) {
  fs::path d = scratch("bundled");
  CliRun r = run("check --config " + kBundled + " --serial --out-dir " + d.string());
  EXPECT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(slurp(d / "report.json"));
  EXPECT_EQ(j["schema"], 1);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_GT(j["summary"]["total"].get<int>(), 50);
  EXPECT_TRUE(fs::exists(d / "timings.json"));
}

TEST(Cli, ReportsAreByteIdentical) {
  fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  ASSERT_EQ(run("check --config " + kBundled + " --serial --out-dir " + a.string()).code, 0);
  ASSERT_EQ(run("check --config " + kBundled + " --serial --out-dir " + b.string()).code, 0);
  ASSERT_EQ(run("check --config " + kBundled + " --out-dir " + c.string()).code, 0);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "report.json"), slurp(c / "report.json"));  // parallel run, same order
  fs::path s = scratch("det_seed");
  ASSERT_EQ(run("check --config " + kBundled + " --serial --seed 99 --out-dir " + s.string()).code, 0);
  EXPECT_NE(slurp(a / "report.json"), slurp(s / "report.json"));
}

TEST(Cli, NegativeControlLabelledValidFails) {
  fs::path d = scratch("negative");
  fs::path cfg = write_cfg(d, "[fixture x2y2]\nkind = nk\ntheta = x^2*y^2\nexpect = valid\nchecks = nk1, nk2, asd\n");
  CliRun r = run("check --config " + cfg.string() + " --serial");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("FAIL x2y2/nk2"), std::string::npos);
  EXPECT_NE(r.out.find("FAIL x2y2/asd"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL x2y2/nk1"), std::string::npos);
}

TEST(Cli, UsageAndConfigErrorsExitTwo) {
  CliRun r = run("check --config /nonexistent/asdnk.cfg");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("cannot open"), std::string::npos);
  EXPECT_EQ(run("check").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("check --config " + kBundled + " --tolerance-scale 0").code, 2);
}

TEST(Cli, ExportFlatMetricIsConstant) {
  fs::path d = scratch("export_flat");
  CliRun r = run("export --config " + kBundled + " --fixture flat --quantity metric --grid x:-1:1:9,y:-1:1:9 --out-dir " +
              d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  int files = 0;
  for (const auto& e : fs::directory_iterator(d)) {
    ++files;
    std::ifstream in(e.path());
    auto [grid, values] = read_csv(in);
    EXPECT_EQ(grid.to_string(), "x:-1:1:9,y:-1:1:9");
    for (double v : values) EXPECT_EQ(v, values[0]) << e.path();
  }
  EXPECT_EQ(files, 10);
  std::ifstream in(d / "flat_metric_g_w_x.csv");
  EXPECT_EQ(read_csv(in).second[0], 0.5);
}

TEST(Cli, ExportXY3CurvatureHasNonzeroWeylColumn) {
  fs::path d = scratch("export_xy3");
  CliRun r = run("export --config " + kBundled + " --fixture xy3 --quantity curvature --grid x:-1:1:9,y:-1:1:9 --out-dir " +
              d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(d / "xy3_curvature_C_0001.csv");
  auto values = read_csv(in).second;
  for (double v : values) EXPECT_NEAR(v, 12.0, 1e-9);
  std::ifstream sd(d / "xy3_curvature_Cp_0000.csv");
  for (double v : read_csv(sd).second) EXPECT_LT(std::abs(v), 1e-8);
}

TEST(Cli, ExportBadQuantityOrAxis) {
  CliRun r = run("export --config " + kBundled + " --fixture flat --quantity torsion --grid x:-1:1:9");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("unknown export quantity"), std::string::npos);
  EXPECT_EQ(run("export --config " + kBundled + " --fixture flat --quantity metric --grid q:-1:1:9").code, 2);
  EXPECT_EQ(run("export --config " + kBundled + " --fixture nope --quantity metric --grid x:-1:1:9").code, 2);
}

TEST(Cli, EvolveZeroDataWritesZeroFiles) {
  fs::path d = scratch("evolve_zero");
  CliRun r = run("evolve --grid x:-1:1:33,y:-1:1:33 --u0 0 --dt 1e-3 --steps 20 --record-every 10 --out-dir " +
              d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"u_0000.csv", "u_0001.csv"}) {
    std::ifstream in(d / f);
    std::string t;
    std::getline(in, t);
    EXPECT_EQ(t.rfind("# t = ", 0), 0u);
    auto [grid, values] = read_csv(in);
    EXPECT_EQ(grid.to_string(), "y:-1:1:33,x:-1:1:33");
    for (double v : values) EXPECT_EQ(v, 0.0);
  }
}

TEST(Cli, EvolveRefusesCflViolation) {
  fs::path d = scratch("evolve_cfl");
  CliRun r = run("evolve --grid x:0:1:65,y:0:1:65 --u0 x --dt 0.01 --steps 1 --out-dir " + d.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("CFL bound dt <= "), std::string::npos) << r.out;
  EXPECT_TRUE(fs::is_empty(d));
}

TEST(Cli, EvolveManufacturedTable) {
  fs::path d = scratch("evolve_mms");
  CliRun r = run("evolve --mode manufactured --grid x:0:1:17,y:0:1:17 --reference 'sin(x)*cos(y)*exp(-t)' --T 0.05 "
              "--cells 8,16,32 --out-dir " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::string table = slurp(d / "convergence.csv");
  EXPECT_EQ(table.rfind("# cells,error_vs_reference,difference_to_next\n8,", 0), 0u) << table;
  EXPECT_NE(table.find("# order "), std::string::npos);
}

TEST(Cli, EvolveReferenceReportsError) {
  fs::path d = scratch("evolve_ref");
  CliRun r = run("evolve --mode reference --grid x:-1:1:33,y:-1:1:33 --reference '-x/(t-1) + y' --T 0.2 --out-dir " +
              d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto pos = r.out.find("relative L2 error vs reference: ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(std::stod(r.out.substr(pos + 32)), 1e-3);
}
