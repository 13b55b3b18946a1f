#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "saddlescope/dynamics.hpp"
#include "saddlescope/errors.hpp"
#include "saddlescope/integrate.hpp"

using namespace saddlescope;

namespace {

IntegratorConfig quick(double t_max, double sample_every = 0.01) {
  IntegratorConfig cfg;
  cfg.t_max = t_max;
  cfg.sample_every = sample_every;
  return cfg;
}

double max_gap(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("augmented Lagrangian flow converges to the benchmark point") {
  VectorField f = saddle_field(augmented_lagrangian());
  Trajectory traj = integrate(f, {1, -2, 4, 8}, quick(100.0));
  CHECK(traj.stop_reason == StopReason::converged);
  CHECK(max_gap(traj.endpoint(), {-1.5, -1.5, 3, 0}) < 0.02);
  // The linear flow preserves x1 + x2 - 2 x3, which pins the limit exactly.
  CHECK(max_gap(traj.endpoint(), {-1.5, -1.5, 3, 0}) < 1e-5);
  CHECK(traj.diagnostics.at("field_norm").back() < 1e-9);
  for (size_t k = 1; k < traj.times.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
}

TEST_CASE("quasi flow converges to the origin") {
  VectorField f = saddle_field(quasi_function());
  Trajectory traj = integrate(f, {0.5, 0.2}, quick(100.0));
  CHECK(traj.stop_reason == StopReason::converged);
  CHECK(max_gap(traj.endpoint(), {0, 0}) < 0.02);
}

TEST_CASE("starting at an equilibrium yields a single converged sample") {
  VectorField f = saddle_field(augmented_lagrangian());
  Trajectory traj = integrate(f, {-1.5, -1.5, 3, 0}, quick(10.0));
  CHECK(traj.stop_reason == StopReason::converged);
  CHECK(traj.times.size() == 1);
}

TEST_CASE("fixed-step RK4 shows fourth-order endpoint convergence") {
  VectorField f = saddle_field(augmented_lagrangian());
  Vec s0{1, -2, 4, 8};

  IntegratorConfig ref = quick(1.0, 1.0);
  ref.rtol = 1e-12;
  ref.atol = 1e-14;
  ref.stop_field_norm = 0.0;
  Vec exact = integrate(f, s0, ref).endpoint();

  auto endpoint_err = [&](double dt) {
    IntegratorConfig cfg = quick(1.0, 1.0);
    cfg.method = Method::rk4_fixed;
    cfg.dt = dt;
    cfg.stop_field_norm = 0.0;
    return max_gap(integrate(f, s0, cfg).endpoint(), exact);
  };
  double e1 = endpoint_err(0.02);
  double e2 = endpoint_err(0.01);
  CHECK(e1 > 1e-12);  // above the roundoff floor, so the ratio is meaningful
  double factor = e1 / e2;
  CHECK(factor >= 12.0);
  CHECK(factor <= 20.0);
}

TEST_CASE("the conserved quantity of x z^2 drifts below 1e-4 at rtol 1e-8") {
  VectorField f = saddle_field(xz_squared());
  IntegratorConfig cfg = quick(200.0);
  cfg.rtol = 1e-8;
  cfg.atol = 1e-10;
  Trajectory traj = integrate(f, {5, 5}, cfg);
  CHECK(traj.stop_reason == StopReason::converged);
  const double c0 = 25.0 + 12.5;
  double drift = 0.0;
  for (const Vec& s : traj.states)
    drift = std::max(drift, std::fabs(s[0] * s[0] + 0.5 * s[1] * s[1] - c0));
  CHECK(drift < 1e-4);
  CHECK(max_gap(traj.endpoint(), {-std::sqrt(37.5), 0}) < 1e-6);
}

TEST_CASE("monitors append per-sample series") {
  VectorField f = saddle_field(xz_squared());
  Trajectory traj = integrate(f, {5, 5}, quick(200.0));
  auto series = monitor(traj, "energy",
                        [](const Vec& s) { return s[0] * s[0] + 0.5 * s[1] * s[1]; });
  CHECK(series.size() == traj.states.size());
  CHECK(traj.diagnostics.count("energy") == 1);
  CHECK(series.front() == doctest::Approx(37.5));
}

TEST_CASE("piecewise integration of the patchy field") {
  PiecewiseField p = patchy_field();
  Trajectory traj = integrate_piecewise(p, {1, 1.6, -1.2}, quick(100.0));
  CHECK(traj.stop_reason == StopReason::converged);
  Vec e = traj.endpoint();
  CHECK(std::fabs(e[0] - e[1]) < 1e-6);
  CHECK(std::fabs(e[1] - e[2]) < 1e-6);

  // Equilibrium line stays fixed.
  for (double c : {-2.0, 0.0, 2.88}) {
    Trajectory fixed = integrate_piecewise(p, {c, c, c}, quick(10.0));
    CHECK(fixed.stop_reason == StopReason::converged);
    CHECK(fixed.times.size() == 1);
  }
}

TEST_CASE("a single-patch wrapper reproduces the smooth integration bitwise") {
  VectorField f = saddle_field(quasi_function());
  PiecewiseField wrap;
  wrap.name = "wrap";
  wrap.dim = f.dim;
  wrap.patches.push_back({[](const Vec&) { return 1.0; }, f});
  IntegratorConfig cfg = quick(25.0);
  Trajectory a = integrate(f, {0.5, 0.2}, cfg);
  Trajectory b = integrate_piecewise(wrap, {0.5, 0.2}, cfg);
  REQUIRE(a.times.size() == b.times.size());
  for (size_t k = 0; k < a.times.size(); ++k) {
    CHECK(a.times[k] == b.times[k]);
    for (size_t i = 0; i < a.states[k].size(); ++i) CHECK(a.states[k][i] == b.states[k][i]);
  }
  CHECK(a.stop_reason == b.stop_reason);
}

TEST_CASE("boundary crossings are localized to the membership zero set") {
  // Two patches split at x = 1; the right branch accelerates. The exact
  // crossing time from x(0) = 0 with unit speed is t = 1.
  VectorField left, right;
  left.name = "left";
  left.dim = 1;
  left.eval = [](const Vec&) { return Vec{1.0}; };
  right.name = "right";
  right.dim = 1;
  right.eval = [](const Vec& s) { return Vec{1.0 + 3.0 * (s[0] - 1.0)}; };
  PiecewiseField pw;
  pw.name = "kink";
  pw.dim = 1;
  pw.patches.push_back({[](const Vec& s) { return 1.0 - s[0]; }, left});
  pw.patches.push_back({[](const Vec& s) { return s[0] - 1.0; }, right});

  IntegratorConfig cfg = quick(2.0, 0.25);
  cfg.stop_field_norm = 0.0;
  Trajectory traj = integrate_piecewise(pw, {0.0}, cfg);
  CHECK(traj.stop_reason == StopReason::t_max);

  bool found_boundary_sample = false;
  for (size_t k = 0; k < traj.times.size(); ++k) {
    if (std::fabs(traj.states[k][0] - 1.0) < 1e-9 && std::fabs(traj.times[k] - 1.0) < 1e-9)
      found_boundary_sample = true;
  }
  CHECK(found_boundary_sample);
  for (size_t k = 1; k < traj.times.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);

  // Closed form after the switch: x(t) = 1 + (e^{3(t-1)} - 1)/3.
  double expected = 1.0 + (std::exp(3.0) - 1.0) / 3.0;
  CHECK(traj.endpoint()[0] == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("identical configurations give identical trajectories") {
  VectorField f = saddle_field(quasi_function());
  IntegratorConfig cfg = quick(50.0);
  Trajectory a = integrate(f, {0.5, 0.2}, cfg);
  Trajectory b = integrate(f, {0.5, 0.2}, cfg);
  REQUIRE(a.times.size() == b.times.size());
  for (size_t k = 0; k < a.times.size(); ++k) {
    CHECK(a.times[k] == b.times[k]);
    for (size_t i = 0; i < a.states[k].size(); ++i) CHECK(a.states[k][i] == b.states[k][i]);
  }
}

TEST_CASE("stop reasons: t_max, blowup, domain violation") {
  VectorField drift;
  drift.name = "drift";
  drift.dim = 1;
  drift.eval = [](const Vec&) { return Vec{1.0}; };
  IntegratorConfig cfg = quick(0.5, 0.1);
  cfg.stop_field_norm = 0.0;
  Trajectory t1 = integrate(drift, {0.0}, cfg);
  CHECK(t1.stop_reason == StopReason::t_max);
  CHECK(t1.times.back() == doctest::Approx(0.5));
  CHECK(t1.endpoint()[0] == doctest::Approx(0.5).epsilon(1e-12));

  VectorField quad;
  quad.name = "quadratic-escape";
  quad.dim = 1;
  quad.eval = [](const Vec& s) { return Vec{s[0] * s[0]}; };
  IntegratorConfig cfg2 = quick(2.0, 0.01);
  cfg2.stop_field_norm = 0.0;
  Trajectory t2 = integrate(quad, {1.0}, cfg2);
  CHECK(t2.stop_reason == StopReason::blowup);
  CHECK(t2.times.back() < 1.01);  // finite-time escape at t = 1

  VectorField guarded = drift;
  guarded.domain_guard = [](const Vec& s) { return s[0] < 0.3; };
  Trajectory t3 = integrate(guarded, {0.0}, cfg);
  CHECK(t3.stop_reason == StopReason::domain_error);
  CHECK(t3.endpoint()[0] < 0.3);

  CHECK_THROWS_AS(integrate(guarded, {1.0}, cfg), DomainError);
}

TEST_CASE("config validation") {
  VectorField f = saddle_field(quasi_function());
  IntegratorConfig bad = quick(1.0);
  bad.sample_every = 0.0;
  CHECK_THROWS_AS(integrate(f, {0.1, 0.1}, bad), ContractError);
  IntegratorConfig bad2 = quick(1.0);
  bad2.method = Method::rk4_fixed;
  bad2.dt = 2.0;
  CHECK_THROWS_AS(integrate(f, {0.1, 0.1}, bad2), ContractError);
  IntegratorConfig bad3 = quick(1.0);
  bad3.rtol = -1.0;
  CHECK_THROWS_AS(integrate(f, {0.1, 0.1}, bad3), ContractError);
}
