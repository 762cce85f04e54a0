#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run(const std::string& args, const std::string& env = "") {
  const fs::path dir = fs::temp_directory_path();
  const fs::path out = dir / ("macrobell_cli_out_" + std::to_string(::getpid()));
  const fs::path err = dir / ("macrobell_cli_err_" + std::to_string(::getpid()));
  const std::string cmd = env + " '" MACROBELL_CLI "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CliRun r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  fs::remove(out);
  fs::remove(err);
  return r;
}

json run_json(const std::string& args) {
  const CliRun r = run(args + " --format json");
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(r.out);
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  EXPECT_EQ(run("nbs-trace --steps 0").code, 2);
  EXPECT_EQ(run("nbs-trace --N 0").code, 2);
  EXPECT_EQ(run("optimize --budget 10").code, 2);
  EXPECT_EQ(run("optimize --kappa-range 3").code, 2);
  EXPECT_EQ(run("bell-ch --mode other").code, 2);
  EXPECT_EQ(run("verify --filter nothing").code, 2);
}

TEST(Cli, DegenerateCatBasisIsAComputationFailure) {
  const CliRun r = run("kerr-chsh --alpha 0.3 --beta 3");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("overlap"), std::string::npos);
}

TEST(Cli, NbsTraceCsv) {
  const CliRun r = run("nbs-trace --N 2 --kappa 1 --g 30 --t-max 100 --steps 50");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,t_scaled,p_N,p_0,leakage");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    for (int col = 0; std::getline(ss, cell, ','); ++col) {
      if (col >= 2) {
        const double v = std::stod(cell);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
  EXPECT_EQ(rows, 51);
  const json summary = json::parse(r.err);
  EXPECT_NEAR(summary["omega_formula"].get<double>(), 0.13333, 1e-5);
  EXPECT_GT(summary["omega_fitted"].get<double>(), 0.0);
}

TEST(Cli, NbsTraceRabiFrequency) {
  const json j = run_json("nbs-trace --N 1 --kappa 2 --g 5 --t-max 3 --steps 3000");
  EXPECT_NEAR(j["omega_fitted"].get<double>(), 2.0, 0.02);
}

TEST(Cli, BellChIdealPeak) {
  const json j = run_json("bell-ch --mode ideal --phi-steps 721");
  EXPECT_NEAR(j["peak_S"].get<double>(), 1.2071, 1e-3);
  EXPECT_NEAR(j["refined_peak_phi"].get<double>(), 1.1780972450961724, 1e-6);
  EXPECT_LT(j["S_at_pi_over_16"].get<double>(), 0.0);
}

TEST(Cli, BellChHamiltonianViolation) {
  const json j = run_json("bell-ch --N 10 --kappa 10 --g 49.433 --mode hamiltonian --phi-steps 40");
  EXPECT_GT(j["peak_S"].get<double>(), 1.0);
  EXPECT_FALSE(j["violation_intervals"].empty());
  for (const auto& row : j["rows"]) EXPECT_TRUE(std::isfinite(row["S"].get<double>()));
}

TEST(Cli, KerrChsh) {
  const json j = run_json("kerr-chsh --alpha 8 --beta 8");
  EXPECT_NEAR(j["B"].get<double>(), 2.444, 0.02);
  EXPECT_EQ(j["E_values"].size(), 4u);
}

TEST(Cli, KerrSweepAllViolate) {
  const json j = run_json("kerr-sweep --alpha-min 2.5 --alpha-max 8 --steps 12");
  EXPECT_TRUE(j["all_B_above_2"].get<bool>());
  EXPECT_EQ(j["rows"].size(), 13u);
}

TEST(Cli, KerrDensityCsvShape) {
  const CliRun r = run("kerr-density --alpha 5 --beta 5 --ta 1.0471975512 --tb 0 --grid-points 101");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("x_A,x_B,density\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 101 * 101);
}

TEST(Cli, KerrDensityTooCoarseIsDiagnosed) {
  const CliRun r = run("kerr-density --alpha 5 --beta 5 --grid-points 21");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("refine the grid"), std::string::npos);
}

TEST(Cli, OptimizeBeatsReference) {
  const json j = run_json("optimize --N 2 --kappa-range 0.1:10 --g-range 1:100 --budget 100 --reference 1:30");
  EXPECT_TRUE(j["beats_reference"].get<bool>());
  EXPECT_LE(j["evaluations"].get<int>(), 100);
  EXPECT_TRUE(j.contains("objective_definition"));
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path cfg = fs::temp_directory_path() / ("macrobell_cfg_" + std::to_string(::getpid()) + ".json");
  std::ofstream(cfg) << R"({"alpha": 3, "beta": 3, "kerr-chsh": {"beta": 4}})";
  const json from_file = run_json("--config '" + cfg.string() + "' kerr-chsh");
  EXPECT_EQ(from_file["alpha"].get<double>(), 3.0);
  EXPECT_EQ(from_file["beta"].get<double>(), 4.0);
  const json overridden = run_json("--config '" + cfg.string() + "' kerr-chsh --alpha 5");
  EXPECT_EQ(overridden["alpha"].get<double>(), 5.0);

  std::ofstream(cfg) << R"({"format": "csv", "kerr-chsh": {"format": "json", "alpha": 3, "beta": 3}})";
  const CliRun scoped = run("--config '" + cfg.string() + "' kerr-chsh");
  ASSERT_EQ(scoped.code, 0) << scoped.err;
  EXPECT_EQ(json::parse(scoped.out)["beta"].get<double>(), 3.0);
  fs::remove(cfg);
}

TEST(Cli, OutputIndependentOfWorkers) {
  const std::string args = "bell-ch --N 3 --kappa 4 --g 20 --phi-steps 16";
  const CliRun one = run(args + " --workers 1");
  const CliRun four = run(args, "MACROBELL_WORKERS=4");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
}

TEST(Cli, CsvUsesFullPrecision) {
  const CliRun r = run("kerr-sweep --alpha-min 3 --alpha-max 3 --steps 1");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string first_row = r.out.substr(r.out.find('\n') + 1);
  EXPECT_EQ(first_row.rfind("3.0000000000000000e+00,", 0), 0u);
}

TEST(Cli, VerifyFilterAndFault) {
  const CliRun ok = run("verify --filter kerr");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.out.find("fock-core"), std::string::npos);
  const CliRun bad = run("verify --filter kerr --inject-fault");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("invariant failures:"), std::string::npos);
}
