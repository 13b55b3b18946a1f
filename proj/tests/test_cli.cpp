#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "saddlescope/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

std::string bin_path() {
  const char* p = std::getenv("SADDLESCOPE_BIN");
  REQUIRE_MESSAGE(p != nullptr, "SADDLESCOPE_BIN must point at the built binary");
  return p;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out_file = fs::temp_directory_path() / ("saddlescope_cli_" +
                                                   std::to_string(::getpid()) + "_" +
                                                   std::to_string(counter++) + ".txt");
  std::string cmd = bin_path() + " " + args + " > " + out_file.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(out_file);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("saddlescope_test_" + tag + "_" +
                                              std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::string csv_last_row(const std::string& csv) {
  size_t end = csv.find_last_not_of('\n');
  size_t start = csv.rfind('\n', end);
  return csv.substr(start + 1, end - start);
}

}  // namespace

TEST_CASE("list prints the six scenarios") {
  CliResult r = run_cli("list");
  CHECK(r.exit_code == 0);
  int lines = 0;
  for (char c : r.out)
    if (c == '\n') ++lines;
  CHECK(lines == 7);  // header + six rows
  CHECK(r.out.find("augmented-lagrangian") != std::string::npos);
  CHECK(r.out.find("patchy") != std::string::npos);

  CliResult rj = run_cli("list --json");
  CHECK(rj.exit_code == 0);
  json arr = json::parse(rj.out);
  CHECK(arr.size() == 6);
  CHECK(arr[0]["name"] == "augmented-lagrangian");
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("list --no-such-flag").exit_code == 2);
  CHECK(run_cli("run --scenario no-such-scenario").exit_code == 2);
  CHECK(run_cli("run").exit_code == 2);  // no scenario given
  CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("run writes the output file set and reproduces the benchmark endpoint") {
  fs::path dir = fresh_dir("run_aug");
  CliResult r = run_cli("run --scenario augmented-lagrangian --out-dir " + dir.string());
  CHECK(r.exit_code == 0);
  for (const char* name : {"trajectory.csv", "report.json", "plot_state.tsv",
                           "plot_objective.tsv", "plot_distance.tsv", "plot_F.tsv"})
    CHECK_MESSAGE(fs::exists(dir / name), name);

  std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t,s1,s2,s3,s4,field_norm,F,objective,distance\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);  // LF endings only

  // Endpoint from the last CSV row.
  std::string last = csv_last_row(csv);
  std::stringstream ss(last);
  std::string cell;
  std::vector<double> row;
  while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
  REQUIRE(row.size() == 9);
  CHECK(std::fabs(row[1] + 1.5) < 0.02);
  CHECK(std::fabs(row[2] + 1.5) < 0.02);
  CHECK(std::fabs(row[3] - 3.0) < 0.02);
  CHECK(std::fabs(row[4]) < 0.02);

  json report = json::parse(slurp(dir / "report.json"));
  CHECK(report["scenario"] == "augmented-lagrangian");
  CHECK(report["stop_reason"] == "converged");
  CHECK(report["all_expected_verdicts_matched"] == true);
  CHECK(report.contains("timestamp"));
  fs::remove_all(dir);
}

TEST_CASE("run accepts an explicit initial condition") {
  fs::path dir = fresh_dir("run_quasi");
  CliResult r = run_cli("run --scenario quasi --x0 0.5,0.2 --out-dir " + dir.string());
  CHECK(r.exit_code == 0);
  fs::remove_all(dir);
}

TEST_CASE("run exits 1 when the endpoint misses the saddle set") {
  fs::path dir = fresh_dir("run_offset");
  CliResult r = run_cli("run --scenario xz-squared --x0 1,0 --out-dir " + dir.string());
  CHECK(r.exit_code == 1);
  fs::remove_all(dir);
}

TEST_CASE("certify prints the verdict table with expected failures matched") {
  CliResult r = run_cli("certify --scenario ring-lagrangian");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("spectrum") != std::string::npos);
  CHECK(r.out.find("range-null-separation") != std::string::npos);
  CHECK(r.out.find("convex-concave") != std::string::npos);
  // The convexity-concavity row reports fail and that is the expectation.
  std::istringstream lines(r.out);
  std::string line;
  bool cc_fail_expected = false;
  while (std::getline(lines, line)) {
    if (line.find("convex-concave") != std::string::npos &&
        line.find("fail") != std::string::npos && line.find("yes") != std::string::npos)
      cc_fail_expected = true;
  }
  CHECK(cc_fail_expected);
}

TEST_CASE("certify --strict-cc treats the expected strict failure as a match") {
  CliResult r = run_cli("certify --scenario augmented-lagrangian --strict-cc");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  bool strict_fail_matched = false;
  while (std::getline(lines, line)) {
    if (line.rfind("  convex-concave ", 0) == 0 && line.find("fail") != std::string::npos &&
        line.find("yes") != std::string::npos)
      strict_fail_matched = true;
  }
  CHECK(strict_fail_matched);
}

TEST_CASE("certify --json emits a machine-readable report") {
  CliResult r = run_cli("certify --scenario quasi --json");
  CHECK(r.exit_code == 0);
  json report = json::parse(r.out);
  CHECK(report["scenario"] == "quasi");
  CHECK(report["certificates"].size() >= 5);
}

TEST_CASE("identical seeds give byte-identical outputs") {
  fs::path dir1 = fresh_dir("det1");
  fs::path dir2 = fresh_dir("det2");
  std::string base = "run --scenario quasi --seed 777 --out-dir ";
  CHECK(run_cli(base + dir1.string()).exit_code == 0);
  CHECK(run_cli(base + dir2.string()).exit_code == 0);
  CHECK(slurp(dir1 / "trajectory.csv") == slurp(dir2 / "trajectory.csv"));
  CHECK(saddlescope::strip_timestamp(slurp(dir1 / "report.json")) ==
        saddlescope::strip_timestamp(slurp(dir2 / "report.json")));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("config files feed the run and flags override them") {
  fs::path dir = fresh_dir("cfg");
  fs::create_directories(dir);
  fs::path cfg = dir / "config.json";
  {
    std::ofstream out(cfg);
    out << R"({"scenario": "quasi", "x0": [0.5, 0.2], "t_max": 80.0, "seed": 3})";
  }
  CliResult r = run_cli("run --config " + cfg.string() + " --out-dir " + dir.string());
  CHECK(r.exit_code == 0);
  json report = json::parse(saddlescope::strip_timestamp(slurp(dir / "report.json")));
  CHECK(report["config"]["t_max"] == 80.0);
  CHECK(report["seed"] == 3);

  CliResult r2 = run_cli("run --config " + cfg.string() + " --seed 9 --out-dir " + dir.string());
  CHECK(r2.exit_code == 0);
  json report2 = json::parse(saddlescope::strip_timestamp(slurp(dir / "report.json")));
  CHECK(report2["seed"] == 9);
  fs::remove_all(dir);
}

TEST_CASE("initial-condition sweeps run in parallel workers") {
  fs::path dir = fresh_dir("sweep");
  CliResult r = run_cli(
      "run --scenario quasi --x0 0.5,0.2 --x0 0.3,-0.1 --x0 -0.4,0.3 --jobs 2 --out-dir " +
      dir.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "run_0" / "report.json"));
  CHECK(fs::exists(dir / "run_1" / "report.json"));
  CHECK(fs::exists(dir / "run_2" / "report.json"));
  fs::remove_all(dir);
}

TEST_CASE("a missing config file is an IO error") {
  CHECK(run_cli("run --config /no/such/config.json").exit_code == 3);
}

TEST_CASE("an unwritable output directory is an IO error") {
  CHECK(run_cli("run --scenario quasi --out-dir /dev/null/nested").exit_code == 3);
}

TEST_CASE("certify handles the pure vector-field scenario") {
  CliResult r = run_cli("certify --scenario patchy");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("limit-jacobians") != std::string::npos);
  CHECK(r.out.find("common-lyapunov") != std::string::npos);
}

TEST_CASE("method and step flags flow into the config echo") {
  fs::path dir = fresh_dir("rk4");
  CliResult r = run_cli("run --scenario quasi --method rk4_fixed --dt 0.001 --t-max 30 --out-dir " +
                        dir.string());
  CHECK(r.exit_code == 0);
  json report = json::parse(slurp(dir / "report.json"));
  CHECK(report["config"]["method"] == "rk4_fixed");
  CHECK(report["config"]["dt"] == 0.001);
  CHECK(report["config"]["t_max"] == 30.0);
  fs::remove_all(dir);
}

TEST_CASE("patchy run writes the distance plot series") {
  fs::path dir = fresh_dir("patchy");
  CliResult r = run_cli("run --scenario patchy --out-dir " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "plot_distance.tsv"));
  std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t,s1,s2,s3,field_norm,F,distance\n", 0) == 0);
  // No saddle function: the F column is nan.
  std::string second_line = csv.substr(csv.find('\n') + 1);
  second_line = second_line.substr(0, second_line.find('\n'));
  CHECK(second_line.find("nan") != std::string::npos);
  fs::remove_all(dir);
}
