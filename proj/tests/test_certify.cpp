#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "saddlescope/certify.hpp"
#include "saddlescope/rng.hpp"
#include "saddlescope/scenarios.hpp"

using namespace saddlescope;

namespace {

SaddleFunction quadratic_saddle() {
  // x^2 - z^2: the textbook strict saddle.
  SaddleFunction f;
  f.name = "x2-minus-z2";
  f.n = 1;
  f.m = 1;
  f.smoothness = Smoothness::C3;
  f.value = [](const Vec& x, const Vec& z) { return x[0] * x[0] - z[0] * z[0]; };
  f.grad_x = [](const Vec& x, const Vec&) { return Vec{2.0 * x[0]}; };
  f.grad_z = [](const Vec&, const Vec& z) { return Vec{-2.0 * z[0]}; };
  f.hess = [](HessBlock b, const Vec&, const Vec&) {
    switch (b) {
      case HessBlock::xx: return Mat{{2}};
      case HessBlock::zz: return Mat{{-2}};
      default: return Mat{{0}};
    }
  };
  return f;
}

}  // namespace

TEST_CASE("check_critical") {
  SaddleFunction lt = augmented_lagrangian();
  CHECK(check_critical(lt, {-1.5, -1.5, 3}, {0}, 1e-8).verdict == Verdict::pass);

  // Equilibrium of the flow but not a saddle: the zz block is positive.
  SaddleFunction xzz = xz_squared();
  Certificate c = check_critical(xzz, {1}, {0}, 1e-8);
  CHECK(c.verdict == Verdict::fail);
  REQUIRE(c.worst_witness.has_value());
  CHECK(c.worst_witness->what.find("zz") != std::string::npos);

  Certificate noncrit = check_critical(lt, {1, 2, 3}, {4}, 1e-8);
  CHECK(noncrit.verdict == Verdict::fail);
  CHECK(noncrit.worst_witness->what.find("gradient") != std::string::npos);
}

TEST_CASE("check_convex_concave on the augmented Lagrangian") {
  SaddleFunction lt = augmented_lagrangian();
  NeighborhoodSpec nbhd{{-1.5, -1.5, 3, 0}, 1.0, 200, 1};
  CHECK(check_convex_concave(lt, nbhd, false).verdict == Verdict::pass);
  Certificate strict = check_convex_concave(lt, nbhd, true);
  CHECK(strict.verdict == Verdict::fail);
  REQUIRE(strict.worst_witness.has_value());
  CHECK(strict.worst_witness->what.find("strict") != std::string::npos);
}

TEST_CASE("check_convex_concave fails for the ring Lagrangian near a saddle") {
  SaddleFunction ring = ring_lagrangian();
  Vec saddle{std::sqrt(0.75) * std::cos(0.7), std::sqrt(0.75) * std::sin(0.7), 0.5, 0.0};
  Certificate c = check_convex_concave(ring, {saddle, 0.1, 200, 2}, false);
  CHECK(c.verdict == Verdict::fail);
  CHECK(c.worst_witness->what.find("x-Hessian") != std::string::npos);
}

TEST_CASE("check_convex_concave strict passes for x^2 - z^2") {
  CHECK(check_convex_concave(quadratic_saddle(), {{0, 0}, 2.0, 100, 3}, true).verdict ==
        Verdict::pass);
}

TEST_CASE("check_linearity_in_z") {
  CHECK(check_linearity_in_z(augmented_lagrangian(), {{-1.5, -1.5, 3, 0}, 1.0, 100, 4})
            .verdict == Verdict::pass);
  CHECK(check_linearity_in_z(quasi_function(), {{0, 0}, 0.5, 100, 4}).verdict ==
        Verdict::fail);
  // Linear in x, not z.
  CHECK(check_linearity_in_z(xz_squared(), {{-1, 0}, 0.5, 100, 4}).verdict == Verdict::fail);
}

TEST_CASE("check_strong_quasi fits the expected constants") {
  SaddleFunction q = quasi_function();

  SliceFunction fx = x_slice(q, {0.0}, {0.0});
  Certificate cx = check_strong_quasi(fx, {{0.0}, 0.5, 400, 5}, 0.7);
  CHECK(cx.verdict == Verdict::pass);
  double fit_x = cx.constants.at("s_fit");
  CHECK(fit_x >= 0.7);
  // The sufficient constant c2 e^{-delta^2} is the infimum of the sampled
  // ratio (approached as lambda -> 1 with u = -v = delta), so the fit sits
  // just above it.
  CHECK(fit_x >= 2.0 * std::exp(-0.25) - 1e-9);
  CHECK(fit_x <= 2.0);
  // Brute-force grid oracle on the same slice.
  double oracle_fit = oracles::quasi_fit_grid(
      [&](double u) { return fx.value({u}); }, -0.5, 0.5);
  CHECK(fit_x == doctest::Approx(oracle_fit).epsilon(0.05));

  SliceFunction fz = z_slice(q, {0.0}, {0.0}, /*negate=*/true);
  Certificate cz = check_strong_quasi(fz, {{0.0}, 0.5, 400, 6}, 0.7);
  CHECK(cz.verdict == Verdict::pass);

  // Plain square: the fit approaches 1 from above.
  SliceFunction sq;
  sq.dim = 1;
  sq.center = {0.0};
  sq.value = [](const Vec& u) { return u[0] * u[0]; };
  sq.gradient = [](const Vec& u) { return Vec{2.0 * u[0]}; };
  Certificate csq = check_strong_quasi(sq, {{0.0}, 1.0, 400, 7}, 0.9);
  CHECK(csq.verdict == Verdict::pass);
  CHECK(csq.constants.at("s_fit") == doctest::Approx(1.0).epsilon(0.02));

  // A linear function has no strong quasiconvexity constant on large sets.
  SliceFunction lin;
  lin.dim = 1;
  lin.center = {0.0};
  lin.value = [](const Vec& u) { return u[0]; };
  lin.gradient = [](const Vec&) { return Vec{1.0}; };
  Certificate clin = check_strong_quasi(lin, {{0.0}, 10.0, 400, 8}, 0.3);
  CHECK(clin.verdict == Verdict::fail);
  CHECK(clin.constants.at("s_fit") < 0.1);
}

TEST_CASE("check_first_order_quasi") {
  SaddleFunction q = quasi_function();
  SliceFunction fx = x_slice(q, {0.0}, {0.0});
  CHECK(check_first_order_quasi(fx, {{0.0}, 0.5, 300, 9}, 0.5).verdict == Verdict::pass);

  SliceFunction sq;
  sq.dim = 1;
  sq.center = {0.0};
  sq.value = [](const Vec& u) { return u[0] * u[0]; };
  sq.gradient = [](const Vec& u) { return Vec{2.0 * u[0]}; };
  // Pairs x = -y force s <= 1 for the square (grad f(y)(x-y) = -4y^2 against
  // -s (2y)^2), so 0.9 passes while anything above one fails.
  CHECK(check_first_order_quasi(sq, {{0.0}, 1.0, 300, 10}, 0.9).verdict == Verdict::pass);
  CHECK(check_first_order_quasi(sq, {{0.0}, 1.0, 300, 10}, 1.1).verdict == Verdict::fail);
  CHECK(check_first_order_quasi(sq, {{0.0}, 1.0, 300, 10}, 2.1).verdict == Verdict::fail);
}

TEST_CASE("check_constant_on_set and the wrong-set negative control") {
  SaddleFunction ring = ring_lagrangian();
  SaddleSetDescriptor circle = circle_set("ring-circle", std::sqrt(0.75), {0.5, 0.0});
  Certificate ok = check_constant_on_set(ring, circle, 64, 1e-9, 1, 0.0);
  CHECK(ok.verdict == Verdict::pass);
  CHECK(std::fabs(ok.constants.at("value_min")) < 1e-12);

  SaddleFunction quartic = quartic_ring();
  SaddleSetDescriptor unit = circle_set("unit-circle", 1.0, {0.0});
  CHECK(check_constant_on_set(quartic, unit, 64, 1e-9, 1, 0.0).verdict == Verdict::pass);

  // A circle of the wrong radius still carries a constant value, but not the
  // declared one.
  SaddleSetDescriptor wrong = circle_set("wrong-circle", 1.1, {0.0});
  Certificate bad = check_constant_on_set(quartic, wrong, 64, 1e-9, 1, 0.0);
  CHECK(bad.verdict == Verdict::fail);
  CHECK(bad.worst_witness->what.find("declared") != std::string::npos);
}

TEST_CASE("check_value_implies_saddle for the augmented Lagrangian") {
  SaddleFunction lt = augmented_lagrangian();
  SaddleSetDescriptor line = line_set("augmented-line", {1, 1, -2, 0}, 5.0);
  Certificate c = check_value_implies_saddle(lt, line, {-1.5, -1.5, 3}, {0},
                                             {{-1.5, -1.5, 3, 0}, 0.5, 200, 11}, 1e-8, 1e-4);
  CHECK(c.verdict == Verdict::pass);
  CHECK(c.samples > 0);  // premise-satisfying samples were seen
}

TEST_CASE("spectrum_report") {
  VectorField ring = saddle_field(ring_lagrangian());
  SaddleSetDescriptor circle = circle_set("ring-circle", std::sqrt(0.75), {0.5, 0.0});
  for (int k = 0; k < 20; ++k) {
    Vec p = circle.embed({6.283185307179586 * k / 20.0});
    Certificate c = spectrum_report(ring, p, 1);
    CHECK(c.verdict == Verdict::pass);
    CHECK(c.constants.at("zero_multiplicity") == 1.0);
    CHECK(c.constants.at("max_real_part_nonzero") < -1e-7);
  }

  VectorField quartic = saddle_field(quartic_ring());
  Certificate fail = spectrum_report(quartic, {1, 0, 0}, 1);
  CHECK(fail.verdict == Verdict::fail);
  CHECK(fail.constants.at("zero_multiplicity") == 2.0);

  PiecewiseField patchy = patchy_field();
  Certificate pw = spectrum_report(patchy, {0.5, 0.5, 0.5}, 1);
  CHECK(pw.verdict == Verdict::pass);
  CHECK(pw.constants.at("limit_matrices") == 2.0);
}

TEST_CASE("check_lemma_eigenvalue") {
  SaddleFunction ring = ring_lagrangian();
  Vec xstar{std::sqrt(0.75) * std::cos(1.1), std::sqrt(0.75) * std::sin(1.1), 0.5};
  CHECK(check_lemma_eigenvalue(ring, xstar, {0}).verdict == Verdict::pass);

  // F = x1 z on R^2 x R: grad_xx vanishes, so range(e1) meets its kernel.
  SaddleFunction bilinear;
  bilinear.name = "x1-z";
  bilinear.n = 2;
  bilinear.m = 1;
  bilinear.smoothness = Smoothness::C3;
  bilinear.value = [](const Vec& x, const Vec& z) { return x[0] * z[0]; };
  bilinear.grad_x = [](const Vec&, const Vec& z) { return Vec{z[0], 0.0}; };
  bilinear.grad_z = [](const Vec& x, const Vec&) { return Vec{x[0]}; };
  bilinear.hess = [](HessBlock b, const Vec&, const Vec&) {
    switch (b) {
      case HessBlock::xx: return Mat{{0, 0}, {0, 0}};
      case HessBlock::xz: return Mat{{1}, {0}};
      case HessBlock::zx: return Mat{{1, 0}};
      case HessBlock::zz: return Mat{{0}};
    }
    return Mat{{0}};
  };
  CHECK(check_lemma_eigenvalue(bilinear, {0, 0}, {0}).verdict == Verdict::fail);

  // z-independent function: the cross block vanishes, degenerate pass.
  SaddleFunction indep;
  indep.name = "x-only";
  indep.n = 1;
  indep.m = 1;
  indep.smoothness = Smoothness::C3;
  indep.value = [](const Vec& x, const Vec&) { return x[0] * x[0]; };
  indep.grad_x = [](const Vec& x, const Vec&) { return Vec{2.0 * x[0]}; };
  indep.grad_z = [](const Vec&, const Vec&) { return Vec{0.0}; };
  indep.hess = [](HessBlock b, const Vec&, const Vec&) {
    return b == HessBlock::xx ? Mat{{2}} : Mat{{0}};
  };
  Certificate deg = check_lemma_eigenvalue(indep, {0}, {0});
  CHECK(deg.verdict == Verdict::pass);
  REQUIRE(!deg.notes.empty());
  CHECK(deg.notes.front().find("degenerate") != std::string::npos);
}

TEST_CASE("instability indicator") {
  VectorField xzz = saddle_field(xz_squared());
  Certificate plus = instability_indicator(xzz, {1, 0});
  CHECK(plus.verdict == Verdict::pass);
  CHECK(plus.constants.at("max_real_part") == doctest::Approx(2.0));
  CHECK(instability_indicator(xzz, {-1, 0}).verdict == Verdict::fail);

  VectorField stable;
  stable.name = "contraction";
  stable.dim = 2;
  stable.eval = [](const Vec& s) { return Vec{-s[0], -s[1]}; };
  stable.jacobian = [](const Vec&) { return -1.0 * Mat::identity(2); };
  CHECK(instability_indicator(stable, {0, 0}).verdict == Verdict::fail);
}

TEST_CASE("proximal hypotheses for the quartic ring") {
  SaddleFunction quartic = quartic_ring();
  SaddleSetDescriptor unit = circle_set("unit-circle", 1.0, {0.0});
  const double lambda_max = 0.5;

  ProximalConstants paper;
  paper.k1 = 1.0;
  paper.alpha1 = 4.0;
  paper.k2 = 1.0;
  paper.beta1 = 2.0;
  paper.l_x = 0.0;
  paper.alpha2 = 0.0;
  paper.l_z = 8.0 * (1.0 + lambda_max);
  paper.beta2 = 1.0;
  Certificate ok = check_proximal_hypotheses(quartic, unit, lambda_max, paper, {});
  CHECK(ok.verdict == Verdict::pass);

  // Sensitivity control: claiming quadratic growth in x must fail near
  // lambda -> 0 because the true growth is quartic.
  ProximalConstants wrong = paper;
  wrong.alpha1 = 2.0;
  Certificate bad = check_proximal_hypotheses(quartic, unit, lambda_max, wrong, {});
  CHECK(bad.verdict == Verdict::fail);
  CHECK(bad.worst_witness->what.find("convex growth") != std::string::npos);

  Certificate degenerate = check_proximal_hypotheses(quartic, unit, 0.0, paper, {});
  CHECK(degenerate.verdict == Verdict::inconclusive);
}

TEST_CASE("Lie derivative of the LaSalle function") {
  SaddleFunction lt = augmented_lagrangian();
  CHECK(lie_derivative_V(lt, {-1.5, -1.5, 3}, {0}, {-1.5, -1.5, 3}, {0}) == 0.0);

  SaddleSetDescriptor line = line_set("augmented-line", {1, 1, -2, 0}, 5.0);
  Certificate c = check_lie_nonpositive(lt, line, 1.0, 5, 200, 21);
  CHECK(c.verdict == Verdict::pass);
  CHECK(c.samples == 1000);

  SaddleFunction q = quasi_function();
  Rng rng(22);
  for (int k = 0; k < 100; ++k) {
    Vec d = rng.ball(2, 0.4);
    double lie = lie_derivative_V(q, {0}, {0}, {d[0]}, {d[1]});
    CHECK(lie <= 1e-15);
  }
}

TEST_CASE("distance diagnostics along trajectories") {
  SaddleFunction quartic = quartic_ring();
  VectorField f = saddle_field(quartic);
  SaddleSetDescriptor unit = circle_set("unit-circle", 1.0, {0.0});
  IntegratorConfig cfg;
  cfg.t_max = 1e6;
  cfg.sample_every = 0.5;
  Trajectory traj = integrate(f, {0.1, 0.2, 4}, cfg);
  CHECK(traj.stop_reason == StopReason::converged);
  Certificate c = distance_diagnostics(traj, unit, true);
  CHECK(c.constants.at("final_distance") < 1e-3);
  CHECK(c.verdict == Verdict::pass);

  // Trajectory starting on the set: the distance series is identically ~0.
  Trajectory on_set = integrate(f, {1, 0, 0}, cfg);
  Certificate triv = distance_diagnostics(on_set, unit, true);
  CHECK(triv.verdict == Verdict::pass);
  CHECK(triv.constants.at("initial_distance") < 1e-12);

  // x z^2: monotonicity is not claimed, only the endpoint.
  VectorField xzz = saddle_field(xz_squared());
  SaddleSetDescriptor half = halfline_set("halfline", 10.0);
  IntegratorConfig cfg2;
  cfg2.t_max = 200.0;
  cfg2.sample_every = 0.01;
  Trajectory t2 = integrate(xzz, {5, 5}, cfg2);
  Certificate final_only = distance_diagnostics(t2, half, false);
  CHECK(final_only.verdict == Verdict::pass);
  CHECK(std::fabs(t2.endpoint()[0] + 6.13) < 0.02);
}

TEST_CASE("linear-in-x hypotheses") {
  SaddleFunction xzz = xz_squared();
  CHECK(check_linear_in_x_hypotheses(xzz, {-1}, {0}, 10.0, 201).verdict == Verdict::pass);
  Certificate bad = check_linear_in_x_hypotheses(xzz, {1}, {0}, 10.0, 201);
  CHECK(bad.verdict == Verdict::fail);
  CHECK(bad.worst_witness->what.find("exceeds") != std::string::npos);

  SaddleFunction zero;
  zero.name = "zero";
  zero.n = 1;
  zero.m = 1;
  zero.smoothness = Smoothness::C3;
  zero.value = [](const Vec&, const Vec&) { return 0.0; };
  zero.grad_x = [](const Vec&, const Vec&) { return Vec{0.0}; };
  zero.grad_z = [](const Vec&, const Vec&) { return Vec{0.0}; };
  Certificate deg = check_linear_in_x_hypotheses(zero, {-1}, {0}, 5.0, 51);
  CHECK(deg.verdict == Verdict::pass);
  CHECK(deg.notes.front().find("degenerate") != std::string::npos);
}

TEST_CASE("projection, distance, and proximal normals are mutually consistent") {
  std::vector<SaddleSetDescriptor> sets = {
      line_set("augmented-line", {1, 1, -2, 0}, 5.0),
      point_set("origin", {0, 0}),
      circle_set("ring-circle", std::sqrt(0.75), {0.5, 0.0}),
      circle_set("unit-circle", 1.0, {0.0}),
      halfline_set("halfline", 10.0),
      line_set("patchy-line", {1, 1, 1}, 5.0),
  };
  Rng rng(99);
  for (const auto& set : sets) {
    CAPTURE(set.name);
    // Embedded points lie on the set.
    for (int k = 0; k < 20; ++k) {
      Vec theta(set.param_dim);
      for (int d = 0; d < set.param_dim; ++d)
        theta[d] = rng.uniform(set.param_box[d].first, set.param_box[d].second);
      CHECK(set.distance(set.embed(theta)) < 1e-10);
    }
    // Projection realizes the distance; normals are unit.
    for (int k = 0; k < 500; ++k) {
      Vec p(set.ambient_dim);
      for (double& v : p) v = rng.uniform(-2.0, 2.0);
      double d = set.distance(p);
      auto proj = set.project(p);
      REQUIRE(!proj.empty());
      for (const Vec& y : proj) {
        Vec diff(p.size());
        for (size_t i = 0; i < p.size(); ++i) diff[i] = p[i] - y[i];
        CHECK(std::fabs(norm2(diff) - d) < 1e-9);
        if (d > 1e-9) {
          for (double& v : diff) v /= d;
          CHECK(std::fabs(norm2(diff) - 1.0) < 1e-12);
        }
      }
      Vec spec = rng.direction(set.normal_spec_dim);
      Vec eta = set.normal_at(proj.front(), spec);
      CHECK(std::fabs(norm2(eta) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("positive scaling preserves verdicts and the field zero set") {
  SaddleFunction lt = augmented_lagrangian();
  SaddleFunction scaled = lt;
  scaled.name = "scaled";
  const double c = 7.0;
  scaled.value = [lt, c](const Vec& x, const Vec& z) { return c * lt.value(x, z); };
  scaled.grad_x = [lt, c](const Vec& x, const Vec& z) {
    Vec g = lt.grad_x(x, z);
    for (double& v : g) v *= c;
    return g;
  };
  scaled.grad_z = [lt, c](const Vec& x, const Vec& z) {
    Vec g = lt.grad_z(x, z);
    for (double& v : g) v *= c;
    return g;
  };
  scaled.hess = [lt, c](HessBlock b, const Vec& x, const Vec& z) {
    return c * lt.hess(b, x, z);
  };

  VectorField f = saddle_field(lt);
  VectorField fc = saddle_field(scaled);
  Rng rng(123);
  for (int k = 0; k < 50; ++k) {
    Vec s(4);
    for (double& v : s) v = rng.uniform(-2, 2);
    Vec a = f.eval(s), b = fc.eval(s);
    for (int i = 0; i < 4; ++i) CHECK(b[i] == doctest::Approx(c * a[i]).epsilon(1e-12));
    double lie = lie_derivative_V(lt, {-1.5, -1.5, 3}, {0}, {s[0], s[1], s[2]}, {s[3]});
    double lie_c = lie_derivative_V(scaled, {-1.5, -1.5, 3}, {0}, {s[0], s[1], s[2]}, {s[3]});
    CHECK(lie_c == doctest::Approx(c * lie).epsilon(1e-12));
    CHECK((lie <= 0) == (lie_c <= 0));
  }
  // Zero set unchanged: still vanishes on the saddle line.
  CHECK(norm2(fc.eval({2, 2, -4, 0})) < 1e-12);

  NeighborhoodSpec nbhd{{-1.5, -1.5, 3, 0}, 1.0, 150, 31};
  CHECK(check_convex_concave(scaled, nbhd, false).verdict ==
        check_convex_concave(lt, nbhd, false).verdict);
  CHECK(check_convex_concave(scaled, nbhd, true).verdict ==
        check_convex_concave(lt, nbhd, true).verdict);
  CHECK(check_critical(scaled, {-1.5, -1.5, 3}, {0}, 1e-8).verdict ==
        check_critical(lt, {-1.5, -1.5, 3}, {0}, 1e-8).verdict);
}
