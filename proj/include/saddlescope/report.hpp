#pragma once

/**
 * File outputs: trajectory CSV (full double precision, LF endings),
 * tab-separated plot series, and the JSON run report. Identical inputs
 * produce byte-identical files, except for the report's timestamp field.
 */

#include <string>
#include <vector>

#include "saddlescope/scenarios.hpp"

namespace saddlescope {

/// CSV schema: header `t, s1..s_dim, field_norm, F, <monitor names...>`,
/// one row per sample, 17 significant digits. A missing F series (pure
/// vector-field scenarios) is emitted as nan.
std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& monitor_order);

/// Two-column series: time against one diagnostic.
std::string plot_tsv(const Trajectory& traj, const std::string& series);

/// Time against every state coordinate.
std::string state_plot_tsv(const Trajectory& traj);

struct ReportConfigEcho {
  std::string scenario;
  Vec initial;
  IntegratorConfig integrator;
  uint64_t seed = 0;
  bool strict_cc = false;
};

/// The run report as a JSON string (2-space indent, sorted keys). When
/// `timestamp` is empty the field is omitted entirely.
std::string report_json(const ScenarioRun& run, const ReportConfigEcho& echo,
                        const std::string& timestamp);

/// Remove the timestamp line from a serialized report, for byte comparisons.
std::string strip_timestamp(const std::string& report);

void write_text_file(const std::string& path, const std::string& content);  // throws on IO failure

}  // namespace saddlescope
