#pragma once

/**
 * Trajectory integration for smooth and piecewise-C2 vector fields.
 *
 * The default method is an embedded Dormand-Prince 5(4) pair with
 * proportional step control; a fixed-step classical RK4 is kept for order
 * checks. Piecewise fields get their patch-boundary crossings localized by
 * bisection so that no accepted step straddles a boundary by more than the
 * stated time tolerance.
 */

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "saddlescope/dynamics.hpp"
#include "saddlescope/linalg.hpp"

namespace saddlescope {

enum class Method { rk4_fixed, rk45_adaptive };
enum class StopReason { converged, t_max, blowup, domain_error };

std::string to_string(StopReason r);

struct IntegratorConfig {
  Method method = Method::rk45_adaptive;
  double dt = 1e-3;       // fixed-step size (rk4_fixed)
  double rtol = 1e-8;     // adaptive relative tolerance
  double atol = 1e-10;    // adaptive absolute tolerance
  double t_max = 100.0;
  double sample_every = 0.01;     // output stride
  double stop_field_norm = 1e-9;  // converged when ||X(s)|| drops below; 0 disables
  double stop_blowup = 1e8;       // blowup when any |s_i| exceeds
};

struct Trajectory {
  std::vector<double> times;   // strictly increasing
  std::vector<Vec> states;
  std::map<std::string, std::vector<double>> diagnostics;  // per-sample series
  StopReason stop_reason = StopReason::t_max;

  const Vec& endpoint() const { return states.back(); }
  double end_time() const { return times.back(); }
};

/// Integrate a smooth field from s0. Samples are recorded on the uniform
/// stride plus boundary/terminal events; "field_norm" is always recorded.
/// A domain-guard violation mid-flight truncates the trajectory with
/// stop_reason = domain_error (the initial state must pass the guard).
Trajectory integrate(const VectorField& x, const Vec& s0, const IntegratorConfig& cfg);

/// As integrate(), stepping each patch's extended smooth field and switching
/// patches at boundary crossings localized to time tolerance 1e-12.
Trajectory integrate_piecewise(const PiecewiseField& p, const Vec& s0,
                               const IntegratorConfig& cfg);

/// Evaluate a functional along the trajectory, append it to diagnostics
/// under `name`, and return the series.
std::vector<double> monitor(Trajectory& traj, const std::string& name,
                            const std::function<double(const Vec&)>& fn);

}  // namespace saddlescope
