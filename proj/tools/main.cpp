// saddlescope command-line frontend: list scenarios, run them (trajectory +
// certificates + plot data), or run the certificate suites alone.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "saddlescope/errors.hpp"
#include "saddlescope/report.hpp"
#include "saddlescope/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace saddlescope;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

Vec parse_x0(const std::string& text) {
  Vec out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::string timestamp_now() {
  std::time_t t = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

uint64_t env_seed() {
  if (const char* s = std::getenv("SADDLESCOPE_SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
      return kDefaultSeed;
    }
  }
  return kDefaultSeed;
}

struct CliSettings {
  std::string scenario;
  std::vector<std::string> x0_texts;
  double t_max = 0, rtol = 0, atol = 0, dt = 0;
  bool has_t_max = false, has_rtol = false, has_atol = false, has_dt = false;
  std::string method;
  uint64_t seed = kDefaultSeed;
  std::string out_dir = "out";
  bool has_out_dir = false;
  bool json_output = false;
  int jobs = 1;
  bool strict_cc = false;
  std::string config_path;
};

/// Merge values from a JSON config file into any setting the command line
/// did not set explicitly.
void merge_config(const std::string& path, const CLI::App* sub, CliSettings& s) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file " + path);
  json cfg = json::parse(in);
  auto absent = [sub](const char* flag) { return sub->count(flag) == 0; };
  if (cfg.contains("scenario") && absent("--scenario"))
    s.scenario = cfg["scenario"].get<std::string>();
  if (cfg.contains("t_max") && absent("--t-max")) {
    s.t_max = cfg["t_max"].get<double>();
    s.has_t_max = true;
  }
  if (cfg.contains("rtol") && absent("--rtol")) {
    s.rtol = cfg["rtol"].get<double>();
    s.has_rtol = true;
  }
  if (cfg.contains("atol") && absent("--atol")) {
    s.atol = cfg["atol"].get<double>();
    s.has_atol = true;
  }
  if (cfg.contains("dt") && absent("--dt")) {
    s.dt = cfg["dt"].get<double>();
    s.has_dt = true;
  }
  if (cfg.contains("method") && absent("--method")) s.method = cfg["method"].get<std::string>();
  if (cfg.contains("seed") && absent("--seed")) s.seed = cfg["seed"].get<uint64_t>();
  if (cfg.contains("out_dir") && absent("--out-dir")) {
    s.out_dir = cfg["out_dir"].get<std::string>();
    s.has_out_dir = true;
  }
  if (cfg.contains("strict_cc") && absent("--strict-cc"))
    s.strict_cc = cfg["strict_cc"].get<bool>();
  if (cfg.contains("jobs") && absent("--jobs")) s.jobs = cfg["jobs"].get<int>();
  if (cfg.contains("x0") && s.x0_texts.empty()) {
    const auto& x0 = cfg["x0"];
    auto to_text = [](const json& arr) {
      std::string text;
      for (size_t i = 0; i < arr.size(); ++i) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", arr[i].get<double>());
        text += (i ? "," : "") + std::string(buf);
      }
      return text;
    };
    if (!x0.empty() && x0.front().is_array())
      for (const auto& one : x0) s.x0_texts.push_back(to_text(one));
    else
      s.x0_texts.push_back(to_text(x0));
  }
}

RunOverrides to_overrides(const CliSettings& s) {
  RunOverrides ov;
  if (s.has_t_max) ov.t_max = s.t_max;
  if (s.has_rtol) ov.rtol = s.rtol;
  if (s.has_atol) ov.atol = s.atol;
  if (s.has_dt) ov.dt = s.dt;
  if (!s.method.empty()) {
    if (s.method == "rk45_adaptive")
      ov.method = Method::rk45_adaptive;
    else if (s.method == "rk4_fixed")
      ov.method = Method::rk4_fixed;
    else
      throw ContractError("--method must be rk45_adaptive or rk4_fixed");
  }
  ov.seed = s.seed;
  ov.strict_cc = s.strict_cc;
  return ov;
}

ReportConfigEcho make_echo(const Scenario& sc, const ScenarioRun& run, const RunOverrides& ov,
                           const Vec& initial) {
  ReportConfigEcho echo;
  echo.scenario = sc.name;
  echo.initial = initial;
  echo.integrator = sc.integrator;
  if (ov.t_max) echo.integrator.t_max = *ov.t_max;
  if (ov.rtol) echo.integrator.rtol = *ov.rtol;
  if (ov.atol) echo.integrator.atol = *ov.atol;
  if (ov.dt) echo.integrator.dt = *ov.dt;
  if (ov.method) echo.integrator.method = *ov.method;
  echo.seed = run.seed_used;
  echo.strict_cc = ov.strict_cc;
  return echo;
}

void write_run_outputs(const fs::path& dir, const ScenarioRun& run,
                       const ReportConfigEcho& echo) {
  fs::create_directories(dir);
  write_text_file((dir / "trajectory.csv").string(),
                  trajectory_csv(run.trajectory, run.monitor_order));
  write_text_file((dir / "report.json").string(), report_json(run, echo, timestamp_now()));
  write_text_file((dir / "plot_state.tsv").string(), state_plot_tsv(run.trajectory));
  for (const std::string& m : run.monitor_order)
    write_text_file((dir / ("plot_" + m + ".tsv")).string(), plot_tsv(run.trajectory, m));
  write_text_file((dir / "plot_field_norm.tsv").string(),
                  plot_tsv(run.trajectory, "field_norm"));
}

void print_cert_table(const ScenarioRun& run) {
  std::printf("  %-36s %-13s %-13s %s\n", "certificate", "verdict", "expected", "match");
  for (const CertOutcome& c : run.certificates)
    std::printf("  %-36s %-13s %-13s %s\n", c.label.c_str(),
                to_string(c.certificate.verdict).c_str(), to_string(c.expected).c_str(),
                c.matched ? "yes" : "NO");
}

int cmd_list(bool as_json) {
  if (as_json) {
    json arr = json::array();
    for (const Scenario& sc : catalog()) {
      json j;
      j["name"] = sc.name;
      j["description"] = sc.description;
      j["dim"] = sc.dim();
      j["saddle_set"] = sc.saddle_set.name;
      j["default_initial"] = sc.default_initial;
      j["expected_limit"] = sc.expected_limit;
      j["limit_tol"] = sc.limit_tol;
      arr.push_back(j);
    }
    std::cout << arr.dump(2) << "\n";
    return kExitOk;
  }
  std::printf("%-22s %-4s %-24s %s\n", "scenario", "dim", "saddle/equilibrium set",
              "expected limit");
  for (const Scenario& sc : catalog()) {
    std::string limit = "(";
    for (size_t i = 0; i < sc.expected_limit.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", sc.expected_limit[i]);
      limit += buf;
      limit += i + 1 < sc.expected_limit.size() ? "," : ")";
    }
    std::printf("%-22s %-4d %-24s %s\n", sc.name.c_str(), sc.dim(), sc.saddle_set.name.c_str(),
                limit.c_str());
  }
  return kExitOk;
}

int cmd_run(const CliSettings& settings) {
  RunOverrides ov = to_overrides(settings);
  const Scenario& sc = find_scenario(settings.scenario);

  std::vector<Vec> initials;
  for (const std::string& text : settings.x0_texts) initials.push_back(parse_x0(text));
  if (initials.empty()) initials.push_back(sc.default_initial);

  std::vector<ScenarioRun> runs(initials.size());
  std::vector<std::string> failures(initials.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= initials.size()) break;
      try {
        RunOverrides one = ov;
        one.initial = initials[i];
        runs[i] = run_scenario(settings.scenario, one);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  int jobs = std::max(1, std::min<int>(settings.jobs, static_cast<int>(initials.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  int exit_code = kExitOk;
  json summary = json::array();
  for (size_t i = 0; i < initials.size(); ++i) {
    if (!failures[i].empty()) {
      std::cerr << "error: " << failures[i] << "\n";
      return kExitUsage;
    }
    const ScenarioRun& run = runs[i];
    RunOverrides one = ov;
    one.initial = initials[i];
    ReportConfigEcho echo = make_echo(sc, run, one, initials[i]);
    fs::path dir = initials.size() == 1
                       ? fs::path(settings.out_dir)
                       : fs::path(settings.out_dir) / ("run_" + std::to_string(i));
    write_run_outputs(dir, run, echo);

    if (settings.json_output) {
      json j;
      j["scenario"] = run.scenario;
      j["initial"] = initials[i];
      j["endpoint"] = run.endpoint;
      j["stop_reason"] = to_string(run.trajectory.stop_reason);
      j["all_expected_verdicts_matched"] = run.all_matched();
      j["success"] = run.success();
      j["out_dir"] = dir.string();
      summary.push_back(j);
    } else {
      std::printf("scenario %s from (", run.scenario.c_str());
      for (size_t k = 0; k < initials[i].size(); ++k)
        std::printf("%s%g", k ? "," : "", initials[i][k]);
      std::printf("): stop=%s t=%g\n", to_string(run.trajectory.stop_reason).c_str(),
                  run.end_time);
      std::printf("  endpoint = (");
      for (size_t k = 0; k < run.endpoint.size(); ++k)
        std::printf("%s%.6g", k ? "," : "", run.endpoint[k]);
      std::printf(")  |field| = %.3g  d_set = %.3g\n", run.final_field_norm,
                  run.final_distance);
      if (run.endpoint_vs_limit_checked)
        std::printf("  limit check: %s (worst gap %.4g, tol %.3g)\n",
                    run.endpoint_ok ? "ok" : "MISMATCH", run.endpoint_gap, sc.limit_tol);
      print_cert_table(run);
      std::printf("  outputs: %s\n", dir.string().c_str());
    }
    if (!run.success()) exit_code = kExitMismatch;
  }
  if (settings.json_output) std::cout << summary.dump(2) << "\n";
  return exit_code;
}

int cmd_certify(const CliSettings& settings) {
  RunOverrides ov = to_overrides(settings);
  ov.skip_trajectory = true;
  const Scenario& sc = find_scenario(settings.scenario);
  ScenarioRun run = run_scenario(settings.scenario, ov);

  if (settings.json_output) {
    ReportConfigEcho echo = make_echo(sc, run, ov, sc.default_initial);
    std::cout << report_json(run, echo, "");
  } else {
    std::printf("certificates for scenario %s:\n", sc.name.c_str());
    print_cert_table(run);
  }
  if (settings.has_out_dir) {
    fs::create_directories(settings.out_dir);
    ReportConfigEcho echo = make_echo(sc, run, ov, sc.default_initial);
    write_text_file((fs::path(settings.out_dir) / "report.json").string(),
                    report_json(run, echo, timestamp_now()));
  }
  return run.all_matched() ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"saddlescope: simulate descent-ascent saddle-point dynamics and certify "
               "stability hypotheses numerically"};
  app.require_subcommand(1);

  CliSettings settings;
  settings.seed = env_seed();

  bool list_json = false;
  CLI::App* list = app.add_subcommand("list", "list the built-in scenarios");
  list->add_flag("--json", list_json, "machine-readable output");

  auto add_common = [&settings](CLI::App* sub, bool with_x0) {
    sub->add_option("--scenario", settings.scenario, "scenario name");
    if (with_x0)
      sub->add_option("--x0", settings.x0_texts,
                      "initial condition 'a,b,...' (repeat for a sweep)");
    sub->add_option("--t-max", settings.t_max, "integration horizon");
    sub->add_option("--rtol", settings.rtol, "adaptive relative tolerance");
    sub->add_option("--atol", settings.atol, "adaptive absolute tolerance");
    sub->add_option("--dt", settings.dt, "fixed step size (rk4_fixed)");
    sub->add_option("--method", settings.method, "rk45_adaptive | rk4_fixed");
    sub->add_option("--seed", settings.seed, "base seed for certificate sampling");
    sub->add_option("--out-dir", settings.out_dir, "output directory (default: out)");
    sub->add_flag("--json", settings.json_output, "machine-readable output");
    sub->add_option("--jobs", settings.jobs, "parallel workers for initial-condition sweeps");
    sub->add_flag("--strict-cc", settings.strict_cc,
                  "run convexity-concavity certificates in strict mode");
    sub->add_option("--config", settings.config_path, "JSON config file (flags override)");
  };

  CLI::App* run = app.add_subcommand("run", "integrate a scenario and run its certificates");
  add_common(run, true);
  CLI::App* certify = app.add_subcommand("certify", "run only the certificate suite");
  add_common(certify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list->parsed()) return cmd_list(list_json);
    CLI::App* sub = run->parsed() ? run : certify;
    settings.has_t_max = sub->count("--t-max") > 0;
    settings.has_rtol = sub->count("--rtol") > 0;
    settings.has_atol = sub->count("--atol") > 0;
    settings.has_dt = sub->count("--dt") > 0;
    settings.has_out_dir = sub->count("--out-dir") > 0;
    if (!settings.config_path.empty()) merge_config(settings.config_path, sub, settings);
    if (settings.scenario.empty()) {
      std::cerr << "error: no scenario given (use --scenario or a config file)\n";
      return kExitUsage;
    }
    if (run->parsed()) return cmd_run(settings);
    return cmd_certify(settings);
  } catch (const LookupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  }
}
