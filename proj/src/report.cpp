#include "saddlescope/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "saddlescope/errors.hpp"

namespace saddlescope {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const std::vector<double>* series_or_null(const Trajectory& traj, const std::string& name) {
  auto it = traj.diagnostics.find(name);
  return it == traj.diagnostics.end() ? nullptr : &it->second;
}

using nlohmann::json;

json witness_json(const Witness& w) {
  json j;
  j["point"] = w.point;
  j["violation"] = w.violation;
  j["what"] = w.what;
  return j;
}

json certificate_json(const CertOutcome& outcome) {
  const Certificate& c = outcome.certificate;
  json j;
  j["label"] = outcome.label;
  j["check"] = c.check_name;
  j["verdict"] = to_string(c.verdict);
  j["expected"] = to_string(outcome.expected);
  j["matched"] = outcome.matched;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tolerances"] = c.tolerances;
  j["constants"] = c.constants;
  if (c.worst_witness) j["worst_witness"] = witness_json(*c.worst_witness);
  if (!c.notes.empty()) j["notes"] = c.notes;
  return j;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& monitor_order) {
  std::ostringstream out;
  const int dim = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  out << "t";
  for (int i = 1; i <= dim; ++i) out << ",s" << i;
  out << ",field_norm,F";
  const std::vector<double>* f_series = series_or_null(traj, "F");
  std::vector<const std::vector<double>*> monitors;
  for (const std::string& name : monitor_order) {
    if (name == "F") continue;  // already a fixed column
    out << "," << name;
    monitors.push_back(series_or_null(traj, name));
  }
  out << "\n";
  const auto& fnorm = traj.diagnostics.at("field_norm");
  for (size_t k = 0; k < traj.states.size(); ++k) {
    out << fmt17(traj.times[k]);
    for (double s : traj.states[k]) out << "," << fmt17(s);
    out << "," << fmt17(fnorm[k]);
    out << "," << fmt17(f_series ? (*f_series)[k] : std::nan(""));
    for (const auto* m : monitors) out << "," << fmt17(m ? (*m)[k] : std::nan(""));
    out << "\n";
  }
  return out.str();
}

std::string plot_tsv(const Trajectory& traj, const std::string& series) {
  auto it = traj.diagnostics.find(series);
  if (it == traj.diagnostics.end()) throw LookupError("no diagnostic series named " + series);
  std::ostringstream out;
  out << "t\t" << series << "\n";
  for (size_t k = 0; k < traj.times.size(); ++k)
    out << fmt17(traj.times[k]) << "\t" << fmt17(it->second[k]) << "\n";
  return out.str();
}

std::string state_plot_tsv(const Trajectory& traj) {
  std::ostringstream out;
  const int dim = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  out << "t";
  for (int i = 1; i <= dim; ++i) out << "\ts" << i;
  out << "\n";
  for (size_t k = 0; k < traj.times.size(); ++k) {
    out << fmt17(traj.times[k]);
    for (double s : traj.states[k]) out << "\t" << fmt17(s);
    out << "\n";
  }
  return out.str();
}

std::string report_json(const ScenarioRun& run, const ReportConfigEcho& echo,
                        const std::string& timestamp) {
  json j;
  j["scenario"] = run.scenario;
  json cfg;
  cfg["scenario"] = echo.scenario;
  cfg["initial"] = echo.initial;
  cfg["method"] = echo.integrator.method == Method::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
  cfg["dt"] = echo.integrator.dt;
  cfg["rtol"] = echo.integrator.rtol;
  cfg["atol"] = echo.integrator.atol;
  cfg["t_max"] = echo.integrator.t_max;
  cfg["sample_every"] = echo.integrator.sample_every;
  cfg["stop_field_norm"] = echo.integrator.stop_field_norm;
  cfg["stop_blowup"] = echo.integrator.stop_blowup;
  cfg["strict_cc"] = echo.strict_cc;
  j["config"] = cfg;
  j["seed"] = echo.seed;
  if (run.has_trajectory) {
    j["stop_reason"] = to_string(run.trajectory.stop_reason);
    j["endpoint"] = run.endpoint;
    j["end_time"] = run.end_time;
    j["final_field_norm"] = run.final_field_norm;
    j["final_distance"] = run.final_distance;
    json ep;
    ep["checked_against_limit"] = run.endpoint_vs_limit_checked;
    ep["endpoint_ok"] = run.endpoint_ok;
    ep["worst_coordinate_gap"] = run.endpoint_gap;
    ep["on_set_ok"] = run.on_set_ok;
    j["endpoint_check"] = ep;
    j["samples"] = run.trajectory.times.size();
  }
  json certs = json::array();
  for (const CertOutcome& c : run.certificates) certs.push_back(certificate_json(c));
  j["certificates"] = certs;
  j["all_expected_verdicts_matched"] = run.all_matched();
  j["success"] = run.success();
  if (!timestamp.empty()) j["timestamp"] = timestamp;
  return j.dump(2) + "\n";
}

std::string strip_timestamp(const std::string& report) {
  json j = json::parse(report);
  j.erase("timestamp");
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::ios_base::failure("failed writing " + path);
}

}  // namespace saddlescope
