#pragma once

/**
 * The catalog of six end-to-end scenarios: each bundles a function or field,
 * its saddle/equilibrium set, the benchmark initial condition and expected
 * limit, monitored functionals, and the certificate suite with expected
 * verdicts (expected failures included; the pass/fail pattern is part of the
 * regression surface).
 */

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "saddlescope/certify.hpp"
#include "saddlescope/dynamics.hpp"
#include "saddlescope/functions.hpp"
#include "saddlescope/integrate.hpp"

namespace saddlescope {

struct Scenario;

struct ExpectedCertificate {
  std::string label;
  Verdict expected = Verdict::pass;
  /// Expected verdict when the convexity-concavity check runs in strict
  /// mode; only set on switchable convex-concave rows.
  std::optional<Verdict> expected_strict_cc;
  bool needs_trajectory = false;
  std::function<Certificate(const Scenario&, const Trajectory*, bool strict_cc,
                            uint64_t seed_base)>
      run;
};

struct Scenario {
  std::string name;
  std::string description;
  std::optional<SaddleFunction> function;     // absent for pure vector fields
  VectorField field;                          // used when piecewise is absent
  std::optional<PiecewiseField> piecewise;
  SaddleSetDescriptor saddle_set;
  Vec default_initial;
  Vec expected_limit;
  double limit_tol = 0.02;  // per coordinate, two-decimal benchmark precision
  IntegratorConfig integrator;
  std::vector<std::pair<std::string, std::function<double(const Vec&)>>> monitors;
  std::vector<ExpectedCertificate> certificates;

  int dim() const { return piecewise ? piecewise->dim : field.dim; }
};

const std::vector<Scenario>& catalog();
const Scenario& find_scenario(const std::string& name);  // LookupError if unknown

constexpr uint64_t kDefaultSeed = 12345;

struct RunOverrides {
  std::optional<Vec> initial;
  std::optional<double> t_max;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<double> dt;
  std::optional<Method> method;
  std::optional<uint64_t> seed;  // base seed for the certificate samplers
  bool strict_cc = false;
  bool skip_certificates = false;
  bool skip_trajectory = false;  // certify-only mode; integrates lazily
};

struct CertOutcome {
  std::string label;
  Verdict expected = Verdict::pass;
  Certificate certificate;
  bool matched = false;
};

struct ScenarioRun {
  std::string scenario;
  uint64_t seed_used = kDefaultSeed;
  Trajectory trajectory;
  bool has_trajectory = false;
  std::vector<std::string> monitor_order;  // CSV/plot column order
  std::vector<CertOutcome> certificates;
  Vec endpoint;
  double end_time = 0.0;
  double final_field_norm = 0.0;
  double final_distance = 0.0;
  bool endpoint_vs_limit_checked = false;
  bool endpoint_ok = true;       // per-coordinate limit check (default initial only)
  double endpoint_gap = 0.0;     // worst per-coordinate gap vs expected limit
  bool on_set_ok = true;         // d_S < 1e-3 and field norm < 1e-6 at the end

  bool all_matched() const;
  bool success() const { return all_matched() && endpoint_ok && on_set_ok; }
};

ScenarioRun run_scenario(const std::string& name, const RunOverrides& overrides = {});

}  // namespace saddlescope
