#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "lambda_mb/scenario.hpp"

using namespace lambda_mb;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void expect_parse_error(const std::string& text, std::size_t line, std::size_t column) {
  try {
    (void)parse_config(text);
    ADD_FAILURE() << "expected ParseError for:\n" << text;
  } catch (const ConfigParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.column(), column) << e.what();
    EXPECT_EQ(std::string(e.what()).rfind("ParseError: line ", 0), 0u) << e.what();
  }
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lambda_mb_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LAMBDA_MB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kTinyTwoSoliton =
    "name = tiny\nscenario = two_soliton\nengine = all\n"
    "n_tau = 321\nn_zeta = 21\ntau_min = -10\ntau_max = 10\nzeta_max = 2\ntol_numeric = 5e-3\n";

}  // namespace

TEST(ParseConfig, EmptyGivesFig2Defaults) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.scenario, Scenario::two_soliton);
  EXPECT_EQ(cfg.params.nu0, 3.0);
  EXPECT_EQ(cfg.params.delta, 0.0);
  EXPECT_EQ(cfg.params.omega0, 1.0);
  EXPECT_EQ(cfg.eps0, 2.0);
  EXPECT_EQ(std::get<DressConstants>(cfg.constants), (DressConstants{1.0, 1.0, 1.0}));
  EXPECT_EQ(cfg.grid, GridSpec{});
  EXPECT_EQ(cfg, parse_config("# only a comment\n\n   \n"));
}

TEST(ParseConfig, ReadsEveryKey) {
  const auto cfg = parse_config(
      "name = x\nscenario = exulton\nengine = dressing\noutput = res\nnu0 = 2.5\ndelta = 0.1\n"
      "omega0 = 1\neta = 0\nk = 0\nomega12_over_2pi_hz = 6.8e9\noptical_wavelength_nm = 780\neps0 = 1\n"
      "c1 = 0.5\nc2 = 0\nc3 = 2\ntau_min = -5\ntau_max = 5\nn_tau = 11\nzeta_min = 1\nzeta_max = 3\n"
      "n_zeta = 7\nprobes = (1,1) (0, 0.5)\ntol_compare = 1e-8\ntol_audit = 1e-9\ntol_numeric = 0.01\n"
      "tol_order = 0.2\ntrack = max_of_P1  # trailing comment\ntrack_slicing = per_tau\n");
  EXPECT_EQ(cfg.name, "x");
  EXPECT_EQ(cfg.scenario, Scenario::exulton);
  EXPECT_EQ(cfg.engine, Engine::dressing);
  EXPECT_EQ(cfg.output, "res");
  EXPECT_EQ(cfg.params.nu0, 2.5);
  EXPECT_EQ(cfg.params.optical_wavelength_nm, 780.0);
  EXPECT_EQ(std::get<DressConstants>(cfg.constants), (DressConstants{0.5, 0.0, 2.0}));
  EXPECT_EQ(cfg.grid.n_zeta, 7u);
  ASSERT_EQ(cfg.probes.size(), 2u);
  EXPECT_EQ(cfg.probes[1], Complex(0.0, 0.5));
  EXPECT_EQ(cfg.tol.order, 0.2);
  EXPECT_EQ(cfg.track, Tracker::max_of_P1);
  EXPECT_EQ(cfg.track_slicing, Slicing::per_tau);
}

TEST(ParseConfig, NegativeOmega0IsRejected) {
  expect_parse_error("omega0 = -1\n", 1, 1);
  expect_parse_error("nu0 = 3\n  omega0 = -1\n", 2, 3);
}

TEST(ParseConfig, ErrorsCarryLineAndColumn) {
  expect_parse_error("nu0 = 3\nbogus = 1\n", 2, 1);
  expect_parse_error("nu0 = 3\nnu0 = 4\n", 2, 1);
  expect_parse_error("\n\nnu0 3\n", 3, 1);
  expect_parse_error("delta = abc\n", 1, 9);
  expect_parse_error("n_tau = -4\n", 1, 9);
  expect_parse_error("n_tau = 2\n", 1, 1);
  expect_parse_error("scenario = three_soliton\n", 1, 12);
  expect_parse_error("a1 = 1\nc2 = 1\n", 1, 1);
  expect_parse_error("tau_min = 5\ntau_max = 1\n", 2, 1);
  expect_parse_error("probes = (1,1) 2\n", 1, 10);
  expect_parse_error("eps0 =\n", 1, 7);
}

TEST(Manifest, RoundTripsCannedScenarios) {
  for (const auto& [name, text] : canned_scenarios()) {
    const auto cfg = parse_config(text);
    EXPECT_EQ(parse_config(to_manifest(cfg)), cfg) << name;
  }
}

TEST(Manifest, RoundTripsRandomConfigs) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    ScenarioConfig cfg;
    cfg.params.nu0 = 0.1 + 5.0 * u(rng);
    cfg.params.delta = u(rng) - 0.5;
    cfg.params.omega0 = u(rng);
    cfg.params.eta = u(rng);
    cfg.params.k = u(rng) / 3.0;
    cfg.eps0 = 0.1 + u(rng);
    if (n % 2) cfg.constants = SolitonConstants{u(rng), u(rng)};
    else cfg.constants = DressConstants{u(rng), u(rng), u(rng)};
    cfg.grid.tau_min = -u(rng) * 50.0;
    cfg.grid.n_tau = 3 + n;
    cfg.probes = {{u(rng), u(rng)}};
    cfg.tol.numeric = u(rng) * 1e-3;
    if (n % 3 == 0) cfg.track = Tracker::max_of_Ib;
    EXPECT_EQ(parse_config(to_manifest(cfg)), cfg);
  }
}

TEST(CannedScenarios, FilesMatchEmbeddedTexts) {
  const std::filesystem::path dir(LAMBDA_MB_SCENARIO_DIR);
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".conf") continue;
    ++files;
    const std::string name = entry.path().stem().string();
    ASSERT_TRUE(canned_scenarios().count(name)) << name;
    const std::string text = slurp(entry.path());
    EXPECT_EQ(text, canned_scenarios().at(name)) << name;
    EXPECT_EQ(parse_config(text), canned_scenario(name)) << name;
    EXPECT_EQ(canned_scenario(name).name, name);
  }
  EXPECT_EQ(files, canned_scenarios().size());
}

TEST(CannedScenarios, Fig2UsesUnitDressConstants) {
  const auto cfg = canned_scenario("fig2");
  EXPECT_EQ(std::get<DressConstants>(cfg.constants), (DressConstants{1.0, 1.0, 1.0}));
  const auto sp = cfg.scenario_params();
  EXPECT_NEAR(sp.a().a1, std::sqrt(2.0 - std::sqrt(3.0)) / 2.0, 1e-15);
  EXPECT_EQ(sp.s.lambda0, Complex(0.0, 2.0));
  EXPECT_THROW((void)canned_scenario("nope"), Error);
}

TEST(WriteCsv, SchemaAndPrecision) {
  GridSpec g;
  g.n_tau = 3;
  g.n_zeta = 2;
  SolutionGrid s(g);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 3; ++i) s.set(j, i, {Complex(1.0 / 3.0, -2.0), 0.0}, ComplexMatrix3::unit(1, 1));
  std::ostringstream os;
  write_csv(os, s);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "zeta,tau,re_Oa,im_Oa,re_Ob,im_Ob,Ia,Ib,P1,P2,P3");
  std::getline(in, line);
  EXPECT_EQ(line, "0,-20,0.333333333333,-2,0,0,4.11111111111,0,0,1,0");
  std::size_t rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, g.size());
}

TEST(RunScenario, WritesArtifactsAndPasses) {
  auto cfg = parse_config(kTinyTwoSoliton);
  const auto dir = scratch_dir("artifacts");
  cfg.output = dir.string();
  const auto result = run_scenario(cfg);
  EXPECT_EQ(result.exit_code, 0) << result.report;
  for (const char* suffix : {"_analytic.csv", "_dressing.csv", "_numeric.csv", "_report.txt", "_manifest.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / ("tiny" + std::string(suffix)))) << suffix;
  }
  const std::string manifest = slurp(dir / "tiny_manifest.txt");
  EXPECT_NE(manifest.find("# derived a1 = "), std::string::npos);
  EXPECT_EQ(parse_config(manifest), cfg);
  EXPECT_NE(result.report.find("status: pass"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(RunScenario, BitIdenticalCsv) {
  auto cfg = parse_config(kTinyTwoSoliton);
  const auto a = scratch_dir("repro_a");
  const auto b = scratch_dir("repro_b");
  cfg.output = a.string();
  (void)run_scenario(cfg);
  cfg.output = b.string();
  (void)run_scenario(cfg);
  for (const char* file : {"tiny_analytic.csv", "tiny_dressing.csv", "tiny_numeric.csv"}) {
    EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(RunScenario, FailedCheckGivesExitOne) {
  auto cfg = parse_config(std::string(kTinyTwoSoliton) + "tol_audit = 0\n");
  cfg.tol.numeric = 1e-12;
  const auto result = run_scenario(cfg, {false});
  EXPECT_EQ(result.exit_code, 1);
  EXPECT_TRUE(result.artifacts.empty());
  EXPECT_NE(result.report.find("relative_field_error_status: fail"), std::string::npos);
}

TEST(RunScenario, EngineErrorIsReportedByName) {
  const auto cfg = parse_config("scenario = slow\na1 = -1\na3 = 0\nengine = analytic\nn_tau = 11\nn_zeta = 5\n");
  const auto result = run_scenario(cfg, {false});
  EXPECT_EQ(result.exit_code, 1);
  EXPECT_NE(result.report.find("ParameterGuard"), std::string::npos);
}

TEST(RunScenario, OrderCheckWhenEnabled) {
  const auto cfg =
      parse_config("scenario = slow\na1 = 1\na3 = 0\nengine = analytic\nn_tau = 201\nn_zeta = 41\ntol_order = 0.2\n");
  const auto result = run_scenario(cfg, {false});
  EXPECT_EQ(result.exit_code, 0) << result.report;
  EXPECT_NE(result.report.find("pde_order_deviation_status: pass"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("cli");
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.conf";
  std::ofstream(good) << kTinyTwoSoliton;
  const auto bad = dir / "bad.conf";
  std::ofstream(bad) << "omega0 = -1\n";
  const auto failing = dir / "failing.conf";
  std::ofstream(failing) << kTinyTwoSoliton << "tol_compare = 0\ntol_audit = 0\n";

  EXPECT_EQ(run_cli("list"), 0);
  EXPECT_EQ(run_cli("run " + good.string() + " --out " + (dir / "out").string()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "tiny_numeric.csv"));
  EXPECT_EQ(run_cli("run " + good.string() + " --engine analytic --check --quiet"), 0);
  EXPECT_EQ(run_cli("run " + bad.string()), 2);
  EXPECT_EQ(run_cli("run " + failing.string() + " --check"), 1);
  EXPECT_EQ(run_cli("run --scenario nope"), 2);
  EXPECT_EQ(run_cli("run --scenario fig4 --engine bogus"), 2);
  EXPECT_EQ(run_cli("run"), 2);
  EXPECT_EQ(run_cli("run " + (dir / "missing.conf").string()), 2);
  EXPECT_EQ(run_cli("run --scenario fast --check --quiet"), 0);
  std::filesystem::remove_all(dir);
}
