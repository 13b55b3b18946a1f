#include "saddlescope/scenarios.hpp"

#include <cmath>

#include "saddlescope/errors.hpp"

namespace saddlescope {

namespace {

Vec head(const Vec& v, int n) { return Vec(v.begin(), v.begin() + n); }
Vec tail(const Vec& v, int n) { return Vec(v.begin() + n, v.end()); }

/// Aggregate a per-point check over a grid of set points into one
/// certificate; every point must pass.
Certificate on_set_points(const std::string& name, const SaddleSetDescriptor& set,
                          int grid, const std::function<Certificate(const Vec&)>& point_check) {
  Certificate agg;
  agg.check_name = name;
  agg.verdict = Verdict::pass;
  int count = 0;
  for (int i = 0; i < grid; ++i) {
    Vec theta(set.param_dim);
    if (set.param_dim > 0) {
      double lo = set.param_box[0].first, hi = set.param_box[0].second;
      theta[0] = lo + (grid == 1 ? 0.5 : static_cast<double>(i) / (grid - 1)) * (hi - lo);
    }
    Certificate c = point_check(set.embed(theta));
    ++count;
    agg.tolerances.insert(c.tolerances.begin(), c.tolerances.end());
    for (const auto& [k, v] : c.constants) agg.constants[k] = v;
    if (c.verdict == Verdict::fail) {
      agg.verdict = Verdict::fail;
      if (c.worst_witness &&
          (!agg.worst_witness || c.worst_witness->violation > agg.worst_witness->violation))
        agg.worst_witness = c.worst_witness;
    }
    if (set.param_dim == 0) break;
  }
  agg.samples = count;
  return agg;
}

ExpectedCertificate critical_on_set_cert(double tol = 1e-7, int grid = 8) {
  return {"critical-on-set", Verdict::pass, std::nullopt, false,
          [tol, grid](const Scenario& sc, const Trajectory*, bool, uint64_t) {
            const SaddleFunction& f = *sc.function;
            return on_set_points("critical-on-set", sc.saddle_set, grid, [&](const Vec& p) {
              return check_critical(f, head(p, f.n), tail(p, f.n), tol);
            });
          }};
}

ExpectedCertificate constant_on_set_cert(double expected_value, double tol = 1e-9) {
  return {"constant-on-set", Verdict::pass, std::nullopt, false,
          [expected_value, tol](const Scenario& sc, const Trajectory*, bool, uint64_t seed) {
            return check_constant_on_set(*sc.function, sc.saddle_set, 64, tol, seed + 11,
                                         expected_value);
          }};
}

ExpectedCertificate convex_concave_cert(const Vec& center, double radius, Verdict expected,
                                        Verdict expected_strict) {
  return {"convex-concave", expected, expected_strict, false,
          [center, radius](const Scenario& sc, const Trajectory*, bool strict_cc,
                           uint64_t seed) {
            NeighborhoodSpec nbhd{center, radius, 200, seed + 5};
            return check_convex_concave(*sc.function, nbhd, strict_cc);
          }};
}

IntegratorConfig default_integrator(double t_max, double sample_every) {
  IntegratorConfig cfg;
  cfg.t_max = t_max;
  cfg.sample_every = sample_every;
  return cfg;
}

Scenario make_augmented_lagrangian() {
  Scenario sc;
  sc.name = "augmented-lagrangian";
  sc.description = "equality-constrained quadratic program; augmented Lagrangian flow";
  sc.function = augmented_lagrangian();
  sc.field = saddle_field(*sc.function);
  sc.saddle_set = line_set("augmented-line", {1, 1, -2, 0}, 5.0);
  sc.default_initial = {1, -2, 4, 8};
  sc.expected_limit = {-1.5, -1.5, 3, 0};
  sc.integrator = default_integrator(100.0, 0.01);
  sc.monitors = {{"objective", [](const Vec& s) {
                    double v = s[0] + s[1] + s[2];
                    return v * v;
                  }}};
  const Vec saddle{-1.5, -1.5, 3, 0};
  sc.certificates = {
      critical_on_set_cert(),
      constant_on_set_cert(0.0),
      convex_concave_cert(saddle, 1.0, Verdict::pass, Verdict::fail),
      {"convex-concave-strict", Verdict::fail, std::nullopt, false,
       [saddle](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         return check_convex_concave(*s.function, {saddle, 1.0, 200, seed + 5}, /*strict=*/true);
       }},
      {"linearity-in-z", Verdict::pass, std::nullopt, false,
       [saddle](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         return check_linearity_in_z(*s.function, {saddle, 1.0, 100, seed + 6});
       }},
      {"equal-value-implies-saddle", Verdict::pass, std::nullopt, false,
       [saddle](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         return check_value_implies_saddle(*s.function, s.saddle_set, head(saddle, 3),
                                           tail(saddle, 3), {saddle, 0.5, 200, seed + 8}, 1e-8,
                                           1e-4);
       }},
      {"lie-derivative-nonpositive", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         return check_lie_nonpositive(*s.function, s.saddle_set, 1.0, 5, 200, seed + 9);
       }},
  };
  return sc;
}

Scenario make_quasi() {
  Scenario sc;
  sc.name = "quasi";
  sc.description = "strongly quasiconvex-quasiconcave product of Gaussians";
  sc.function = quasi_function();
  sc.field = saddle_field(*sc.function);
  sc.saddle_set = point_set("quasi-origin", {0, 0});
  sc.default_initial = {0.5, 0.2};
  sc.expected_limit = {0, 0};
  sc.integrator = default_integrator(100.0, 0.01);
  sc.monitors = {{"V", [](const Vec& s) { return 0.5 * (s[0] * s[0] + s[1] * s[1]); }}};
  sc.certificates = {
      critical_on_set_cert(),
      constant_on_set_cert(2.0),  // F(0,0) = 2 on the singleton set
      {"strong-quasiconvex-x", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         SliceFunction slice = x_slice(*s.function, {0.0}, {0.0});
         return check_strong_quasi(slice, {{0.0}, 0.5, 400, seed + 12}, 0.7);
       }},
      {"strong-quasiconcave-z", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         SliceFunction slice = z_slice(*s.function, {0.0}, {0.0}, /*negate=*/true);
         return check_strong_quasi(slice, {{0.0}, 0.5, 400, seed + 13}, 0.7);
       }},
      {"first-order-quasiconvex-x", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         SliceFunction slice = x_slice(*s.function, {0.0}, {0.0});
         return check_first_order_quasi(slice, {{0.0}, 0.5, 300, seed + 14}, 0.5);
       }},
      convex_concave_cert({0, 0}, 1.0, Verdict::fail, Verdict::fail),
  };
  return sc;
}

Scenario make_ring_lagrangian() {
  Scenario sc;
  sc.name = "ring-lagrangian";
  sc.description = "nonconvex ring objective with a plane constraint";
  sc.function = ring_lagrangian();
  sc.field = saddle_field(*sc.function);
  sc.saddle_set = circle_set("ring-circle", std::sqrt(0.75), {0.5, 0.0});
  sc.default_initial = {0.9, 0.7, 0.2, 0.3};
  sc.expected_limit = {0.68, 0.53, 0.50, 0};
  // The nonzero Jacobian spectrum on the saddle circle has a slow complex
  // pair (real part about -0.055), so the 1e-9 field-norm stop needs t ~ 360.
  sc.integrator = default_integrator(500.0, 0.01);
  sc.monitors = {{"objective", [](const Vec& s) {
                    double r = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
                    return (r - 1.0) * (r - 1.0);
                  }}};
  sc.certificates = {
      critical_on_set_cert(),
      constant_on_set_cert(0.0),
      {"spectrum", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t) {
         return on_set_points("spectrum", s.saddle_set, 8,
                              [&](const Vec& p) { return spectrum_report(s.field, p, 1); });
       }},
      {"range-null-separation", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t) {
         return on_set_points("range-null-separation", s.saddle_set, 8, [&](const Vec& p) {
           return check_lemma_eigenvalue(*s.function, head(p, 3), tail(p, 3));
         });
       }},
      {"linearity-in-z", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         Vec center = s.saddle_set.embed({0.6});
         return check_linearity_in_z(*s.function, {center, 0.3, 100, seed + 15});
       }},
      convex_concave_cert(circle_set("ring-circle", std::sqrt(0.75), {0.5, 0.0}).embed({0.6}),
                          0.1, Verdict::fail, Verdict::fail),
  };
  return sc;
}

Scenario make_quartic_ring() {
  Scenario sc;
  sc.name = "quartic-ring";
  sc.description = "quartic ring potential with quadratic z-coupling";
  sc.function = quartic_ring();
  sc.field = saddle_field(*sc.function);
  sc.saddle_set = circle_set("unit-circle", 1.0, {0.0});
  sc.default_initial = {0.1, 0.2, 4};
  sc.expected_limit = {0.49, 0.86, 0};
  sc.integrator = default_integrator(1e6, 0.5);
  sc.monitors = {};
  sc.certificates = {
      critical_on_set_cert(),
      constant_on_set_cert(0.0),
      {"proximal-hypotheses", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t seed) {
         const double lambda_max = 0.5;
         ProximalConstants c;
         c.k1 = 1.0;
         c.alpha1 = 4.0;
         c.k2 = 1.0;
         c.beta1 = 2.0;
         c.l_x = 0.0;
         c.alpha2 = 0.0;
         c.l_z = 8.0 * (1.0 + lambda_max);
         c.beta2 = 1.0;
         ProximalGrids grids;
         grids.seed = seed + 7;
         return check_proximal_hypotheses(*s.function, s.saddle_set, lambda_max, c, grids);
       }},
      {"spectrum", Verdict::fail, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t) {
         return on_set_points("spectrum", s.saddle_set, 8,
                              [&](const Vec& p) { return spectrum_report(s.field, p, 1); });
       }},
      {"distance-monotone", Verdict::pass, std::nullopt, true,
       [](const Scenario& s, const Trajectory* traj, bool, uint64_t) {
         return distance_diagnostics(*traj, s.saddle_set, /*require_monotone=*/true);
       }},
  };
  return sc;
}

Scenario make_xz_squared() {
  Scenario sc;
  sc.name = "xz-squared";
  sc.description = "bilinear-in-x benchmark with a conserved quantity";
  sc.function = xz_squared();
  sc.field = saddle_field(*sc.function);
  sc.saddle_set = halfline_set("nonpositive-halfline", 10.0);
  sc.default_initial = {5, 5};
  sc.expected_limit = {-6.13, 0};
  sc.integrator = default_integrator(200.0, 0.01);
  sc.monitors = {{"conserved", [](const Vec& s) { return s[0] * s[0] + 0.5 * s[1] * s[1]; }}};
  sc.certificates = {
      critical_on_set_cert(),
      constant_on_set_cert(0.0),
      {"linear-in-x-hypotheses", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t) {
         return check_linear_in_x_hypotheses(*s.function, {-1.0}, {0.0}, 10.0, 201);
       }},
      {"linear-in-x-hypotheses-at-plus-one", Verdict::fail, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t) {
         return check_linear_in_x_hypotheses(*s.function, {1.0}, {0.0}, 10.0, 201);
       }},
      {"instability-indicator", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t) {
         Certificate agg;
         agg.check_name = "instability-indicator";
         agg.verdict = Verdict::pass;
         for (double x0 : {0.5, 1.0, 2.0}) {
           Certificate c = instability_indicator(s.field, {x0, 0.0});
           ++agg.samples;
           for (const auto& [k, v] : c.constants) agg.constants[k] = v;
           if (c.verdict != Verdict::pass) {
             agg.verdict = Verdict::fail;
             agg.worst_witness = c.worst_witness;
           }
         }
         return agg;
       }},
      {"conserved-energy", Verdict::pass, std::nullopt, true,
       [](const Scenario&, const Trajectory* traj, bool, uint64_t) {
         return check_conserved(*traj, "x^2+z^2/2",
                                [](const Vec& p) { return p[0] * p[0] + 0.5 * p[1] * p[1]; },
                                1e-4);
       }},
      {"distance-final", Verdict::pass, std::nullopt, true,
       [](const Scenario& s, const Trajectory* traj, bool, uint64_t) {
         return distance_diagnostics(*traj, s.saddle_set, /*require_monotone=*/false);
       }},
  };
  return sc;
}

Scenario make_patchy() {
  Scenario sc;
  sc.name = "patchy";
  sc.description = "piecewise-C2 field with a line of equilibria";
  sc.piecewise = patchy_field();
  sc.field.name = "patchy-global";
  sc.field.dim = 3;
  {
    PiecewiseField pf = patchy_field();
    sc.field.eval = [pf](const Vec& s) { return pf.eval(s); };
  }
  sc.saddle_set = line_set("patchy-line", {1, 1, 1}, 5.0);
  sc.default_initial = {1, 1.6, -1.2};
  sc.expected_limit = {2.88, 2.88, 2.88};
  sc.integrator = default_integrator(100.0, 0.01);
  sc.monitors = {};

  const Mat expected_q_a1{{0, 0, 0}, {0, -5, 3}, {0, 3, -9}};
  const Mat expected_q_a2{{0, 0, 0}, {0, -6, 0}, {0, 0, -18}};

  auto block_cert = [](const std::string& label, const Mat& a, const Mat& expected) {
    return ExpectedCertificate{
        label, Verdict::pass, std::nullopt, false,
        [a, expected](const Scenario&, const Trajectory*, bool, uint64_t) {
          Certificate cert;
          cert.check_name = "block-transform";
          cert.verdict = Verdict::pass;
          cert.samples = 1;
          cert.tolerances["entry_tol"] = 1e-9;
          auto bt = block_transform(patchy_transform_q(), a, 1);
          double gap = max_abs(bt.printed - expected);
          cert.constants["max_entry_gap"] = gap;
          if (gap > 1e-9) cert.fail_with({}, gap, "transformed matrix differs from the benchmark");
          if (!bt.zero_block_ok) cert.fail_with({}, 1.0, "leading block does not vanish");
          return cert;
        }};
  };

  sc.certificates = {
      {"limit-jacobians", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t) {
         Certificate cert;
         cert.check_name = "limit-jacobians";
         cert.verdict = Verdict::pass;
         cert.tolerances["frobenius_tol"] = 1e-9;
         for (double c : {-1.0, 0.5, 2.88}) {
           auto jacs = limit_jacobians(*s.piecewise, {c, c, c});
           ++cert.samples;
           if (jacs.size() != 2) {
             cert.fail_with({c, c, c}, static_cast<double>(jacs.size()),
                            "expected two limit Jacobians on the equilibrium line");
             continue;
           }
           double gap = std::min(frobenius_norm(jacs[0] - patchy_linear_part(0)),
                                 frobenius_norm(jacs[1] - patchy_linear_part(0))) +
                        std::min(frobenius_norm(jacs[0] - patchy_linear_part(1)),
                                 frobenius_norm(jacs[1] - patchy_linear_part(1)));
           cert.constants["worst_gap"] = std::max(cert.constants["worst_gap"], gap);
           if (gap > 1e-9)
             cert.fail_with({c, c, c}, gap, "limit Jacobians differ from the patch matrices");
         }
         return cert;
       }},
      block_cert("block-transform-a1", patchy_linear_part(0), expected_q_a1),
      block_cert("block-transform-a2", patchy_linear_part(1), expected_q_a2),
      {"common-lyapunov", Verdict::pass, std::nullopt, false,
       [](const Scenario&, const Trajectory*, bool, uint64_t) {
         Certificate cert;
         cert.check_name = "common-lyapunov";
         cert.verdict = Verdict::pass;
         cert.samples = 2;
         Mat p = Mat::identity(2);
         for (int i = 0; i < 2; ++i) {
           auto bt = block_transform(patchy_transform_q(), patchy_linear_part(i), 1);
           double res = lyapunov_residual(bt.trailing_block, p);
           cert.constants["residual_a" + std::to_string(i + 1)] = res;
           if (res >= 0.0)
             cert.fail_with({}, res, "Lyapunov residual not negative for patch " +
                                         std::to_string(i + 1));
         }
         return cert;
       }},
      {"spectrum-piecewise", Verdict::pass, std::nullopt, false,
       [](const Scenario& s, const Trajectory*, bool, uint64_t) {
         Certificate agg;
         agg.check_name = "spectrum-piecewise";
         agg.verdict = Verdict::pass;
         for (double c : {-1.0, 0.5, 2.88}) {
           Certificate one = spectrum_report(*s.piecewise, {c, c, c}, 1);
           ++agg.samples;
           for (const auto& [k, v] : one.constants) agg.constants[k] = v;
           if (one.verdict != Verdict::pass) {
             agg.verdict = Verdict::fail;
             agg.worst_witness = one.worst_witness;
           }
         }
         return agg;
       }},
  };
  return sc;
}

}  // namespace

const std::vector<Scenario>& catalog() {
  static const std::vector<Scenario> scenarios = {
      make_augmented_lagrangian(), make_quasi(),      make_ring_lagrangian(),
      make_quartic_ring(),         make_xz_squared(), make_patchy(),
  };
  return scenarios;
}

const Scenario& find_scenario(const std::string& name) {
  for (const Scenario& sc : catalog())
    if (sc.name == name) return sc;
  throw LookupError("unknown scenario: " + name);
}

bool ScenarioRun::all_matched() const {
  for (const CertOutcome& c : certificates)
    if (!c.matched) return false;
  return true;
}

ScenarioRun run_scenario(const std::string& name, const RunOverrides& overrides) {
  const Scenario& sc = find_scenario(name);
  ScenarioRun out;
  out.scenario = name;

  IntegratorConfig cfg = sc.integrator;
  if (overrides.t_max) cfg.t_max = *overrides.t_max;
  if (overrides.rtol) cfg.rtol = *overrides.rtol;
  if (overrides.atol) cfg.atol = *overrides.atol;
  if (overrides.dt) cfg.dt = *overrides.dt;
  if (overrides.method) cfg.method = *overrides.method;
  const uint64_t seed_base = overrides.seed.value_or(kDefaultSeed);
  out.seed_used = seed_base;
  Vec s0 = overrides.initial.value_or(sc.default_initial);
  if (static_cast<int>(s0.size()) != sc.dim())
    throw ContractError(name + ": initial condition has wrong dimension");
  bool default_start = !overrides.initial || *overrides.initial == sc.default_initial;

  bool need_traj = !overrides.skip_trajectory;
  if (overrides.skip_trajectory && !overrides.skip_certificates) {
    for (const auto& cert : sc.certificates)
      if (cert.needs_trajectory) need_traj = true;
  }

  if (need_traj) {
    out.trajectory = sc.piecewise ? integrate_piecewise(*sc.piecewise, s0, cfg)
                                  : integrate(sc.field, s0, cfg);
    out.has_trajectory = true;
    if (sc.function) {
      const SaddleFunction f = *sc.function;
      monitor(out.trajectory, "F", [f](const Vec& s) {
        return eval(f, Vec(s.begin(), s.begin() + f.n), Vec(s.begin() + f.n, s.end()));
      });
      out.monitor_order.push_back("F");
    }
    for (const auto& [mname, fn] : sc.monitors) {
      monitor(out.trajectory, mname, fn);
      out.monitor_order.push_back(mname);
    }
    monitor(out.trajectory, "distance",
            [&sc](const Vec& s) { return sc.saddle_set.distance(s); });
    out.monitor_order.push_back("distance");

    out.endpoint = out.trajectory.endpoint();
    out.end_time = out.trajectory.end_time();
    out.final_field_norm = out.trajectory.diagnostics.at("field_norm").back();
    out.final_distance = sc.saddle_set.distance(out.endpoint);

    if (default_start) {
      out.endpoint_vs_limit_checked = true;
      double worst = 0.0;
      for (size_t i = 0; i < out.endpoint.size(); ++i)
        worst = std::max(worst, std::fabs(out.endpoint[i] - sc.expected_limit[i]));
      out.endpoint_gap = worst;
      out.endpoint_ok = worst <= sc.limit_tol;
    }
    out.on_set_ok = out.final_distance < 1e-3 && out.final_field_norm < 1e-6;
  }

  if (!overrides.skip_certificates) {
    for (const auto& expected : sc.certificates) {
      if (expected.needs_trajectory && !out.has_trajectory) continue;
      CertOutcome outcome;
      outcome.label = expected.label;
      outcome.expected = (overrides.strict_cc && expected.expected_strict_cc)
                             ? *expected.expected_strict_cc
                             : expected.expected;
      outcome.certificate = expected.run(sc, out.has_trajectory ? &out.trajectory : nullptr,
                                          overrides.strict_cc, seed_base);
      outcome.matched = outcome.certificate.verdict == outcome.expected;
      out.certificates.push_back(std::move(outcome));
    }
  }
  return out;
}

}  // namespace saddlescope
