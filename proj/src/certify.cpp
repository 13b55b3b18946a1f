#include "saddlescope/certify.hpp"

#include <algorithm>
#include <cmath>

#include "saddlescope/errors.hpp"
#include "saddlescope/rng.hpp"

namespace saddlescope {

namespace {

constexpr double kRelSlack = 1e-8;  // multiplicative slack on bound checks

Vec concat(const Vec& a, const Vec& b) {
  Vec out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::pair<Vec, Vec> split_state(const SaddleFunction& f, const Vec& state) {
  return {Vec(state.begin(), state.begin() + f.n),
          Vec(state.begin() + f.n, state.begin() + f.n + f.m)};
}

/// Seeded ball sample around the center, redrawn until it passes the guard.
Vec guarded_ball_sample(const SaddleFunction& f, Rng& rng, const Vec& center, double radius) {
  for (int tries = 0; tries < 1000; ++tries) {
    Vec offset = rng.ball(static_cast<int>(center.size()), radius);
    Vec state = center;
    for (size_t i = 0; i < state.size(); ++i) state[i] += offset[i];
    auto [x, z] = split_state(f, state);
    if (!f.domain_guard || f.domain_guard(x, z)) return state;
  }
  throw DomainError(f.name + ": could not sample inside the domain guard");
}

/// Uniform grid over the set's parameter box (param_dim 0 gives one point).
std::vector<Vec> param_grid(const SaddleSetDescriptor& set, int count) {
  std::vector<Vec> thetas;
  if (set.param_dim == 0) {
    thetas.push_back({});
    return thetas;
  }
  // One-dimensional parameter domains cover the catalog; higher dimensions
  // take a per-axis grid on the first axis and midpoints elsewhere.
  const auto& box = set.param_box;
  for (int i = 0; i < count; ++i) {
    Vec theta(set.param_dim);
    double frac = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    theta[0] = box[0].first + frac * (box[0].second - box[0].first);
    for (int d = 1; d < set.param_dim; ++d)
      theta[d] = 0.5 * (box[d].first + box[d].second);
    thetas.push_back(theta);
  }
  return thetas;
}

double definiteness_tol(const Mat& h, double base) { return base * (1.0 + max_abs(h)); }

}  // namespace

SliceFunction x_slice(const SaddleFunction& f, const Vec& z_fixed, const Vec& x_center,
                      bool negate) {
  SliceFunction s;
  s.dim = f.n;
  s.center = x_center;
  const double sign = negate ? -1.0 : 1.0;
  s.value = [f, z_fixed, sign](const Vec& u) { return sign * eval(f, u, z_fixed); };
  s.gradient = [f, z_fixed, sign](const Vec& u) {
    Vec g = grad(f, Arg::x, u, z_fixed);
    for (double& gi : g) gi *= sign;
    return g;
  };
  return s;
}

SliceFunction z_slice(const SaddleFunction& f, const Vec& x_fixed, const Vec& z_center,
                      bool negate) {
  SliceFunction s;
  s.dim = f.m;
  s.center = z_center;
  const double sign = negate ? -1.0 : 1.0;
  s.value = [f, x_fixed, sign](const Vec& u) { return sign * eval(f, x_fixed, u); };
  s.gradient = [f, x_fixed, sign](const Vec& u) {
    Vec g = grad(f, Arg::z, x_fixed, u);
    for (double& gi : g) gi *= sign;
    return g;
  };
  return s;
}

// ---------------------------------------------------------------------------
// Point and neighborhood checks.
// ---------------------------------------------------------------------------

Certificate check_critical(const SaddleFunction& f, const Vec& x, const Vec& z, double tol) {
  Certificate cert;
  cert.check_name = "critical-point";
  cert.tolerances["grad_tol"] = tol;
  cert.verdict = Verdict::pass;
  cert.samples = 1;

  Vec gx = grad(f, Arg::x, x, z);
  Vec gz = grad(f, Arg::z, x, z);
  double ngx = norm2(gx), ngz = norm2(gz);
  cert.constants["grad_norm_x"] = ngx;
  cert.constants["grad_norm_z"] = ngz;
  Vec state = concat(x, z);
  if (ngx >= tol || ngz >= tol)
    cert.fail_with(state, std::max(ngx, ngz), "gradient does not vanish");

  if (f.smoothness != Smoothness::C1) {
    Mat hxx = hess_block(f, HessBlock::xx, x, z);
    Mat hzz = hess_block(f, HessBlock::zz, x, z);
    auto dxx = definiteness(hxx, definiteness_tol(hxx, 1e-8));
    auto dzz = definiteness(hzz, definiteness_tol(hzz, 1e-8));
    cert.constants["min_eig_xx"] = dxx.min_eigenvalue;
    cert.constants["max_eig_zz"] = dzz.max_eigenvalue;
    if (!is_psd_like(dxx))
      cert.fail_with(state, -dxx.min_eigenvalue, "xx-Hessian not positive semidefinite");
    if (!is_nsd_like(dzz))
      cert.fail_with(state, dzz.max_eigenvalue, "zz-Hessian not negative semidefinite");
  }
  return cert;
}

Certificate check_convex_concave(const SaddleFunction& f, const NeighborhoodSpec& nbhd,
                                 bool strict, double def_tol) {
  Certificate cert;
  cert.check_name = strict ? "convex-concave-strict" : "convex-concave";
  cert.tolerances["def_tol"] = def_tol;
  cert.tolerances["radius"] = nbhd.radius;
  cert.seed = nbhd.seed;
  cert.samples = nbhd.samples;
  cert.verdict = Verdict::pass;

  Rng rng(nbhd.seed);
  double worst_x = std::numeric_limits<double>::infinity();
  double worst_z = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < nbhd.samples; ++k) {
    Vec state = guarded_ball_sample(f, rng, nbhd.center, nbhd.radius);
    auto [x, z] = split_state(f, state);
    Mat hxx = hess_block(f, HessBlock::xx, x, z);
    Mat hzz = hess_block(f, HessBlock::zz, x, z);
    auto dxx = definiteness(hxx, definiteness_tol(hxx, def_tol));
    auto dzz = definiteness(hzz, definiteness_tol(hzz, def_tol));
    worst_x = std::min(worst_x, dxx.min_eigenvalue);
    worst_z = std::max(worst_z, dzz.max_eigenvalue);
    if (!is_psd_like(dxx))
      cert.fail_with(state, -dxx.min_eigenvalue, "x-Hessian not positive semidefinite");
    if (!is_nsd_like(dzz))
      cert.fail_with(state, dzz.max_eigenvalue, "z-Hessian not negative semidefinite");
  }
  cert.constants["min_eig_xx_over_samples"] = worst_x;
  cert.constants["max_eig_zz_over_samples"] = worst_z;

  if (strict && cert.verdict == Verdict::pass) {
    // Either slice through the center must be strictly definite.
    bool x_strict = true, z_strict = true;
    auto [xc, zc] = split_state(f, nbhd.center);
    Rng rng2(nbhd.seed + 1);
    for (int k = 0; k < nbhd.samples; ++k) {
      Vec state = guarded_ball_sample(f, rng2, nbhd.center, nbhd.radius);
      auto [x, z] = split_state(f, state);
      Mat hxx = hess_block(f, HessBlock::xx, x, zc);
      if (definiteness(hxx, definiteness_tol(hxx, def_tol)).tag != Definiteness::PD)
        x_strict = false;
      Mat hzz = hess_block(f, HessBlock::zz, xc, z);
      if (definiteness(hzz, definiteness_tol(hzz, def_tol)).tag != Definiteness::ND)
        z_strict = false;
      if (!x_strict && !z_strict) break;
    }
    cert.constants["x_slice_strict"] = x_strict ? 1.0 : 0.0;
    cert.constants["z_slice_strict"] = z_strict ? 1.0 : 0.0;
    if (!x_strict && !z_strict)
      cert.fail_with(nbhd.center, 0.0, "neither the x-slice nor the z-slice is strictly definite");
  }
  return cert;
}

Certificate check_linearity_in_z(const SaddleFunction& f, const NeighborhoodSpec& nbhd,
                                 double tol) {
  Certificate cert;
  cert.check_name = "linearity-in-z";
  cert.tolerances["tol"] = tol;
  cert.seed = nbhd.seed;
  cert.samples = nbhd.samples;
  cert.verdict = Verdict::pass;

  Rng rng(nbhd.seed);
  for (int k = 0; k < nbhd.samples; ++k) {
    Vec state = guarded_ball_sample(f, rng, nbhd.center, nbhd.radius);
    auto [x, z] = split_state(f, state);
    Mat hzz = hess_block(f, HessBlock::zz, x, z);
    if (max_abs(hzz) > tol)
      cert.fail_with(state, max_abs(hzz), "zz-Hessian does not vanish");
    // Pair the sample with a second z draw; grad_z must not move.
    Vec state2 = guarded_ball_sample(f, rng, nbhd.center, nbhd.radius);
    auto [x2, z2] = split_state(f, state2);
    (void)x2;
    Vec g1 = grad(f, Arg::z, x, z);
    Vec g2 = grad(f, Arg::z, x, z2);
    double gap = 0.0;
    for (size_t i = 0; i < g1.size(); ++i) gap = std::max(gap, std::fabs(g1[i] - g2[i]));
    if (gap > tol) cert.fail_with(state, gap, "grad_z depends on z");
  }
  return cert;
}

Certificate check_strong_quasi(const SliceFunction& slice, const NeighborhoodSpec& nbhd,
                               double s_min) {
  Certificate cert;
  cert.check_name = "strong-quasiconvexity";
  cert.tolerances["s_min"] = s_min;
  cert.tolerances["radius"] = nbhd.radius;
  cert.seed = nbhd.seed;

  double fit = std::numeric_limits<double>::infinity();
  Vec worst;
  long used = 0;
  auto consider = [&](const Vec& u, const Vec& v, double lambda) {
    double dist2 = 0.0;
    for (size_t i = 0; i < u.size(); ++i) dist2 += (u[i] - v[i]) * (u[i] - v[i]);
    double den = lambda * (1.0 - lambda) * dist2;
    if (den < 1e-12) return;
    Vec mid(u.size());
    for (size_t i = 0; i < u.size(); ++i) mid[i] = lambda * u[i] + (1.0 - lambda) * v[i];
    double ratio = (std::max(slice.value(u), slice.value(v)) - slice.value(mid)) / den;
    ++used;
    if (ratio < fit) {
      fit = ratio;
      worst = concat(concat(u, v), {lambda});
    }
  };

  if (slice.dim == 1) {
    // Deterministic grid pass; extremal triples of smooth slices are easy to
    // bracket in one dimension.
    const int g = 41, lg = 19;
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        if (i == j) continue;
        Vec u{slice.center[0] + nbhd.radius * (2.0 * i / (g - 1) - 1.0)};
        Vec v{slice.center[0] + nbhd.radius * (2.0 * j / (g - 1) - 1.0)};
        for (int l = 1; l <= lg; ++l) consider(u, v, l / (lg + 1.0));
      }
  }
  Rng rng(nbhd.seed);
  for (int k = 0; k < nbhd.samples; ++k) {
    Vec du = rng.ball(slice.dim, nbhd.radius);
    Vec dv = rng.ball(slice.dim, nbhd.radius);
    Vec u = slice.center, v = slice.center;
    for (int i = 0; i < slice.dim; ++i) {
      u[i] += du[i];
      v[i] += dv[i];
    }
    consider(u, v, rng.uniform(0.02, 0.98));
  }

  cert.samples = used;
  cert.constants["s_fit"] = fit;
  if (!std::isfinite(fit)) {
    cert.verdict = Verdict::inconclusive;
    cert.notes.push_back("no admissible triple sampled");
  } else if (fit >= s_min) {
    cert.verdict = Verdict::pass;
  } else {
    cert.verdict = Verdict::fail;
    cert.worst_witness = Witness{worst, s_min - fit, "fitted s below s_min"};
  }
  return cert;
}

Certificate check_first_order_quasi(const SliceFunction& slice, const NeighborhoodSpec& nbhd,
                                    double s) {
  Certificate cert;
  cert.check_name = "first-order-quasiconvexity";
  cert.tolerances["s"] = s;
  cert.tolerances["slack"] = 1e-9;
  cert.seed = nbhd.seed;
  cert.verdict = Verdict::pass;

  long used = 0;
  auto consider = [&](const Vec& a, const Vec& b) {
    // Orient the pair so f(x) <= f(y).
    const Vec& x = slice.value(a) <= slice.value(b) ? a : b;
    const Vec& y = slice.value(a) <= slice.value(b) ? b : a;
    double dist2 = 0.0;
    for (size_t i = 0; i < x.size(); ++i) dist2 += (x[i] - y[i]) * (x[i] - y[i]);
    Vec g = slice.gradient(y);
    double lhs = 0.0;
    for (size_t i = 0; i < x.size(); ++i) lhs += g[i] * (x[i] - y[i]);
    double rhs = -s * dist2;
    ++used;
    if (lhs > rhs + 1e-9 * (1.0 + std::fabs(rhs)))
      cert.fail_with(concat(x, y), lhs - rhs, "first-order inequality violated");
  };

  if (slice.dim == 1) {
    const int g = 41;
    for (int i = 0; i < g; ++i)
      for (int j = i + 1; j < g; ++j) {
        Vec a{slice.center[0] + nbhd.radius * (2.0 * i / (g - 1) - 1.0)};
        Vec b{slice.center[0] + nbhd.radius * (2.0 * j / (g - 1) - 1.0)};
        consider(a, b);
      }
  }
  Rng rng(nbhd.seed);
  for (int k = 0; k < nbhd.samples; ++k) {
    Vec da = rng.ball(slice.dim, nbhd.radius);
    Vec db = rng.ball(slice.dim, nbhd.radius);
    Vec a = slice.center, b = slice.center;
    for (int i = 0; i < slice.dim; ++i) {
      a[i] += da[i];
      b[i] += db[i];
    }
    consider(a, b);
  }
  cert.samples = used;
  return cert;
}

Certificate check_constant_on_set(const SaddleFunction& f, const SaddleSetDescriptor& set,
                                  int samples, double tol, uint64_t seed,
                                  std::optional<double> expected_value) {
  Certificate cert;
  cert.check_name = "constant-on-set:" + set.name;
  cert.tolerances["tol"] = tol;
  cert.seed = seed;
  cert.verdict = Verdict::pass;

  Rng rng(seed);
  std::vector<Vec> thetas = param_grid(set, samples / 2 + 1);
  for (int k = 0; k < samples / 2; ++k) {
    Vec theta(set.param_dim);
    for (int d = 0; d < set.param_dim; ++d)
      theta[d] = rng.uniform(set.param_box[d].first, set.param_box[d].second);
    thetas.push_back(theta);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  Vec lo_point, hi_point;
  for (const Vec& theta : thetas) {
    Vec p = set.embed(theta);
    auto [x, z] = split_state(f, p);
    double v = eval(f, x, z);
    if (v < lo) { lo = v; lo_point = p; }
    if (v > hi) { hi = v; hi_point = p; }
  }
  cert.samples = static_cast<long>(thetas.size());
  cert.constants["value_min"] = lo;
  cert.constants["value_max"] = hi;
  if (hi - lo >= tol)
    cert.fail_with(hi_point, hi - lo, "function varies over the set");
  if (expected_value) {
    cert.constants["expected_value"] = *expected_value;
    double mean = 0.5 * (lo + hi);
    if (std::fabs(mean - *expected_value) >= tol)
      cert.fail_with(lo_point, std::fabs(mean - *expected_value),
                     "common value differs from the declared value");
  }
  return cert;
}

Certificate check_value_implies_saddle(const SaddleFunction& f, const SaddleSetDescriptor& set,
                                       const Vec& x_star, const Vec& z_star,
                                       const NeighborhoodSpec& nbhd, double value_tol,
                                       double dist_tol) {
  Certificate cert;
  cert.check_name = "equal-value-implies-saddle";
  cert.tolerances["value_tol"] = value_tol;
  cert.tolerances["dist_tol"] = dist_tol;
  cert.seed = nbhd.seed;
  cert.verdict = Verdict::pass;

  const double f_star = eval(f, x_star, z_star);
  long premise_hits = 0;
  auto consider = [&](const Vec& x) {
    double v = eval(f, x, z_star);
    if (std::fabs(v - f_star) >= value_tol) return;
    ++premise_hits;
    Vec state = concat(x, z_star);
    double d = set.distance(state);
    if (d > dist_tol)
      cert.fail_with(state, d, "equal value but far from the saddle set");
  };

  // Set points supply premise-satisfying samples; random ball points probe
  // for spurious equal-value states off the set.
  for (const Vec& theta : param_grid(set, nbhd.samples / 4 + 2)) {
    Vec p = set.embed(theta);
    consider(Vec(p.begin(), p.begin() + f.n));
  }
  Rng rng(nbhd.seed);
  for (int k = 0; k < nbhd.samples; ++k) {
    Vec dx = rng.ball(f.n, nbhd.radius);
    Vec x = x_star;
    for (int i = 0; i < f.n; ++i) x[i] += dx[i];
    consider(x);
  }
  cert.samples = premise_hits;
  if (premise_hits == 0) {
    cert.verdict = Verdict::inconclusive;
    cert.notes.push_back("no sample satisfied the equal-value premise");
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Spectral checks.
// ---------------------------------------------------------------------------

namespace {

void spectrum_conditions(Certificate& cert, const Mat& jac, int p, const Vec& state) {
  Spectrum spec = eigenvalues(jac);
  cert.tolerances["tol_zero"] = spec.tol_zero;
  cert.constants["zero_multiplicity"] = spec.zero_multiplicity;
  if (spec.has_nonzero)
    cert.constants["max_real_part_nonzero"] =
        std::max(spec.max_real_part_nonzero,
                 cert.constants.count("max_real_part_nonzero")
                     ? cert.constants["max_real_part_nonzero"]
                     : -std::numeric_limits<double>::infinity());
  if (spec.zero_multiplicity != p)
    cert.fail_with(state, std::fabs(spec.zero_multiplicity - p),
                   "zero eigenvalue multiplicity " + std::to_string(spec.zero_multiplicity) +
                       " differs from manifold dimension " + std::to_string(p));
  int rank = numerical_rank(jac, spec.tol_zero);
  if (jac.rows() - rank != spec.zero_multiplicity)
    cert.fail_with(state, std::fabs(jac.rows() - rank - spec.zero_multiplicity),
                   "zero eigenvalue is not semisimple");
  if (spec.has_nonzero && spec.max_real_part_nonzero >= -spec.tol_zero)
    cert.fail_with(state, spec.max_real_part_nonzero,
                   "nonzero eigenvalue with nonnegative real part");
}

}  // namespace

Certificate spectrum_report(const VectorField& field, const Vec& state, int p) {
  Certificate cert;
  cert.check_name = "spectrum";
  cert.verdict = Verdict::pass;
  cert.samples = 1;
  spectrum_conditions(cert, jacobian_at(field, state), p, state);
  return cert;
}

Certificate spectrum_report(const PiecewiseField& field, const Vec& state, int p) {
  Certificate cert;
  cert.check_name = "spectrum-piecewise";
  cert.verdict = Verdict::pass;
  auto jacs = limit_jacobians(field, state);
  cert.samples = static_cast<long>(jacs.size());
  cert.constants["limit_matrices"] = static_cast<double>(jacs.size());
  for (const Mat& jac : jacs) spectrum_conditions(cert, jac, p, state);
  return cert;
}

Certificate check_lemma_eigenvalue(const SaddleFunction& f, const Vec& x, const Vec& z) {
  Certificate cert;
  cert.check_name = "range-null-separation";
  cert.verdict = Verdict::pass;
  Vec state = concat(x, z);

  NeighborhoodSpec small{state, 1e-3 * (1.0 + norm2(state)), 24, 2024};
  Certificate lin = check_linearity_in_z(f, small, 1e-8);
  if (lin.verdict != Verdict::pass) {
    cert.verdict = Verdict::fail;
    cert.worst_witness = lin.worst_witness;
    cert.notes.push_back("precondition violated: function is not linear in z near the point");
    return cert;
  }

  Mat b = hess_block(f, HessBlock::xz, x, z);
  Mat a = hess_block(f, HessBlock::xx, x, z);
  if (max_abs(b) < 1e-12 * (1.0 + max_abs(a)))
    cert.notes.push_back("degenerate: cross Hessian vanishes, range is {0}");
  auto basis = range_null_intersection(b, a, 1e-8);
  cert.constants["intersection_dim"] = static_cast<double>(basis.size());
  cert.samples = 1;
  if (!basis.empty())
    cert.fail_with(state, static_cast<double>(basis.size()),
                   "range(grad_zx) meets null(grad_xx) nontrivially");
  return cert;
}

Certificate instability_indicator(const VectorField& field, const Vec& equilibrium) {
  Certificate cert;
  cert.check_name = "instability-indicator";
  cert.samples = 1;
  Spectrum spec = eigenvalues(jacobian_at(field, equilibrium));
  cert.tolerances["tol_zero"] = spec.tol_zero;
  double max_real = -std::numeric_limits<double>::infinity();
  for (const auto& ev : spec.eigenvalues) max_real = std::max(max_real, ev.real());
  cert.constants["max_real_part"] = max_real;
  if (max_real > spec.tol_zero) {
    cert.verdict = Verdict::pass;  // pass = "unstable indicated"
  } else {
    cert.verdict = Verdict::fail;
    cert.worst_witness = Witness{equilibrium, -max_real, "no eigenvalue with positive real part"};
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Proximal-normal hypotheses.
// ---------------------------------------------------------------------------

Certificate check_proximal_hypotheses(const SaddleFunction& f, const SaddleSetDescriptor& set,
                                      double lambda_max, const ProximalConstants& c,
                                      const ProximalGrids& grids) {
  Certificate cert;
  cert.check_name = "proximal-hypotheses";
  cert.seed = grids.seed;
  cert.constants = {{"k1", c.k1},   {"alpha1", c.alpha1}, {"k2", c.k2},
                    {"beta1", c.beta1}, {"L_x", c.l_x},   {"alpha2", c.alpha2},
                    {"L_z", c.l_z}, {"beta2", c.beta2},   {"lambda_max", lambda_max}};
  if (lambda_max <= 0.0) {
    cert.verdict = Verdict::inconclusive;
    cert.notes.push_back("degenerate grid: lambda_max is not positive");
    return cert;
  }
  cert.verdict = Verdict::pass;

  // Exponent compatibility conditions.
  if (c.l_x != 0.0 && c.alpha1 > c.alpha2 + 1.0)
    cert.fail_with({}, c.alpha1 - c.alpha2 - 1.0, "exponent condition alpha1 <= alpha2 + 1 violated");
  if (c.l_z != 0.0 && c.beta1 > c.beta2 + 1.0)
    cert.fail_with({}, c.beta1 - c.beta2 - 1.0, "exponent condition beta1 <= beta2 + 1 violated");

  // Lambda grid: linear plus log-spaced values near zero, where slow-growth
  // violations show up.
  std::vector<double> lambdas;
  for (int j = 1; j <= grids.lambda_samples; ++j)
    lambdas.push_back(lambda_max * j / (grids.lambda_samples + 1.0));
  for (double frac : {1e-4, 1e-3, 1e-2}) lambdas.push_back(lambda_max * frac);
  std::sort(lambdas.begin(), lambdas.end());

  Rng rng(grids.seed);
  long samples = 0;
  for (const Vec& theta : param_grid(set, grids.set_samples)) {
    Vec y = set.embed(theta);
    auto [x_star, z_star] = split_state(f, y);
    const double f_star = eval(f, x_star, z_star);

    std::vector<Vec> specs;
    for (int d = 0; d < set.normal_spec_dim; ++d) {
      Vec e(set.normal_spec_dim, 0.0);
      e[d] = 1.0;
      specs.push_back(e);
      e[d] = -1.0;
      specs.push_back(e);
    }
    for (int k = 0; k < grids.normal_samples; ++k) specs.push_back(rng.direction(set.normal_spec_dim));

    for (const Vec& spec : specs) {
      Vec eta = set.normal_at(y, spec);
      Vec eta_x(eta.begin(), eta.begin() + f.n);
      Vec eta_z(eta.begin() + f.n, eta.end());
      const double nx = norm2(eta_x), nz = norm2(eta_z);

      std::vector<double> fx_vals, fz_vals;
      for (double lam : lambdas) {
        ++samples;
        Vec xp = x_star, zp = z_star;
        for (int i = 0; i < f.n; ++i) xp[i] += lam * eta_x[i];
        for (int i = 0; i < f.m; ++i) zp[i] += lam * eta_z[i];

        const double fx = eval(f, xp, z_star);
        const double fz = eval(f, x_star, zp);
        fx_vals.push_back(fx);
        fz_vals.push_back(fz);

        // Growth bounds with multiplicative slack.
        const double grow = c.k1 * std::pow(lam * nx, c.alpha1);
        if (fx - f_star < grow / (1.0 + kRelSlack))
          cert.fail_with(concat(xp, z_star), grow - (fx - f_star),
                         "convex growth bound violated along the x-normal");
        const double decay = c.k2 * std::pow(lam * nz, c.beta1);
        if (fz - f_star > -decay / (1.0 + kRelSlack))
          cert.fail_with(concat(x_star, zp), (fz - f_star) + decay,
                         "concave decay bound violated along the z-normal");

        // Mixed-Hessian variation bound over the t grid.
        for (int ti = 0; ti <= grids.t_samples; ++ti) {
          double t = static_cast<double>(ti) / grids.t_samples;
          Vec xa = x_star, za = z_star, xb = x_star, zb = z_star;
          for (int i = 0; i < f.n; ++i) {
            xa[i] += t * lam * eta_x[i];
            xb[i] += lam * eta_x[i];
          }
          for (int i = 0; i < f.m; ++i) {
            za[i] += lam * eta_z[i];
            zb[i] += t * lam * eta_z[i];
          }
          Mat diff = hess_block(f, HessBlock::xz, xa, za) - hess_block(f, HessBlock::xz, xb, zb);
          double lhs = spectral_norm(diff);
          double rhs = c.l_x * std::pow(lam * nx, c.alpha2) + c.l_z * std::pow(lam * nz, c.beta2);
          if (lhs > rhs * (1.0 + kRelSlack) + 1e-12)
            cert.fail_with(concat(xa, za), lhs - rhs, "mixed-Hessian variation bound violated");
        }
      }

      // Midpoint convexity of the x-slice / concavity of the z-slice along
      // the normal ray.
      for (size_t i = 0; i < lambdas.size(); ++i)
        for (size_t j = i + 2; j < lambdas.size(); j += 2) {
          // Only use triples whose middle grid point is the exact midpoint.
          if (std::fabs(0.5 * (lambdas[i] + lambdas[j]) - lambdas[i + (j - i) / 2]) > 1e-12)
            continue;
          size_t mid = i + (j - i) / 2;
          double tol_mid = 1e-10 * (1.0 + std::fabs(fx_vals[i]) + std::fabs(fx_vals[j]));
          if (fx_vals[mid] > 0.5 * (fx_vals[i] + fx_vals[j]) + tol_mid)
            cert.fail_with(y, fx_vals[mid] - 0.5 * (fx_vals[i] + fx_vals[j]),
                           "x-slice not convex along the normal");
          if (fz_vals[mid] < 0.5 * (fz_vals[i] + fz_vals[j]) - tol_mid)
            cert.fail_with(y, 0.5 * (fz_vals[i] + fz_vals[j]) - fz_vals[mid],
                           "z-slice not concave along the normal");
        }
    }
  }
  cert.samples = samples;
  return cert;
}

// ---------------------------------------------------------------------------
// Trajectory checks.
// ---------------------------------------------------------------------------

double lie_derivative_V(const SaddleFunction& f, const Vec& x_star, const Vec& z_star,
                        const Vec& x, const Vec& z) {
  Vec gx = grad(f, Arg::x, x, z);
  Vec gz = grad(f, Arg::z, x, z);
  double acc = 0.0;
  for (int i = 0; i < f.n; ++i) acc -= (x[i] - x_star[i]) * gx[i];
  for (int i = 0; i < f.m; ++i) acc += (z[i] - z_star[i]) * gz[i];
  return acc;
}

Certificate distance_diagnostics(const Trajectory& traj, const SaddleSetDescriptor& set,
                                 bool require_monotone, double final_tol) {
  Certificate cert;
  cert.check_name = "distance-to-set:" + set.name;
  cert.verdict = Verdict::pass;
  cert.samples = static_cast<long>(traj.states.size());
  if (traj.states.empty()) {
    cert.verdict = Verdict::inconclusive;
    cert.notes.push_back("empty trajectory");
    return cert;
  }
  const double d0 = set.distance(traj.states.front());
  const double slack = 1e-6 * (1.0 + d0);
  cert.tolerances["monotone_slack"] = slack;
  cert.tolerances["final_tol"] = final_tol;

  double prev = d0;
  double worst_increase = 0.0;
  size_t worst_idx = 0;
  for (size_t k = 1; k < traj.states.size(); ++k) {
    double d = set.distance(traj.states[k]);
    if (d - prev > worst_increase) {
      worst_increase = d - prev;
      worst_idx = k;
    }
    prev = d;
  }
  cert.constants["initial_distance"] = d0;
  cert.constants["final_distance"] = prev;
  cert.constants["worst_increase"] = worst_increase;
  if (require_monotone && worst_increase > slack)
    cert.fail_with(traj.states[worst_idx], worst_increase, "distance series increased");
  if (prev >= final_tol)
    cert.fail_with(traj.states.back(), prev, "final distance above tolerance");
  if (!require_monotone)
    cert.notes.push_back("monotonicity not required for this run");
  return cert;
}

Certificate check_linear_in_x_hypotheses(const SaddleFunction& f, const Vec& x_star,
                                         const Vec& z_star, double z_range, int grid,
                                         double tol, double tol_g) {
  Certificate cert;
  cert.check_name = "linear-in-x-hypotheses";
  cert.tolerances["tol"] = tol;
  cert.tolerances["tol_g"] = tol_g;
  cert.verdict = Verdict::pass;
  cert.samples = grid;

  const double f_star = eval(f, x_star, z_star);

  // The form F = g(z)'x makes grad_x independent of x; spot-check that.
  {
    Vec probe = x_star;
    for (double& xi : probe) xi = 2.0 * xi + 0.25;
    Vec g1 = grad(f, Arg::x, x_star, z_star);
    Vec g2 = grad(f, Arg::x, probe, z_star);
    double gap = 0.0;
    for (size_t i = 0; i < g1.size(); ++i) gap = std::max(gap, std::fabs(g1[i] - g2[i]));
    if (gap > 1e-8) {
      cert.verdict = Verdict::fail;
      cert.worst_witness = Witness{concat(probe, z_star), gap,
                                   "grad_x depends on x: function is not of the linear-in-x form"};
      return cert;
    }
  }

  bool g_all_zero = true;
  for (int k = 0; k < grid; ++k) {
    Vec z(f.m);
    for (int d = 0; d < f.m; ++d)
      z[d] = -z_range + 2.0 * z_range * (grid == 1 ? 0.5 : static_cast<double>(k) / (grid - 1));
    double v = eval(f, x_star, z);
    if (v > f_star + tol)
      cert.fail_with(concat(x_star, z), v - f_star, "F(x*, z) exceeds F(x*, z*)");
    Vec g = grad(f, Arg::x, x_star, z);
    double gnorm = norm2(g);
    if (gnorm > 1e-12) g_all_zero = false;
    if (std::fabs(dot(g, x_star)) < tol && gnorm >= tol_g)
      cert.fail_with(concat(x_star, z), gnorm, "g(z)'x* = 0 without g(z) = 0");
  }
  if (g_all_zero) cert.notes.push_back("degenerate: g vanishes on the whole grid");
  cert.notes.push_back("trajectory boundedness is assumed; verified per run by a bounded monitor");
  return cert;
}

Certificate check_conserved(const Trajectory& traj, const std::string& label,
                            const std::function<double(const Vec&)>& fn, double tol) {
  Certificate cert;
  cert.check_name = "conserved:" + label;
  cert.tolerances["tol"] = tol;
  cert.verdict = Verdict::pass;
  cert.samples = static_cast<long>(traj.states.size());
  if (traj.states.empty()) {
    cert.verdict = Verdict::inconclusive;
    return cert;
  }
  const double ref = fn(traj.states.front());
  double drift = 0.0;
  size_t worst = 0;
  for (size_t k = 0; k < traj.states.size(); ++k) {
    double d = std::fabs(fn(traj.states[k]) - ref);
    if (d > drift) {
      drift = d;
      worst = k;
    }
  }
  cert.constants["reference"] = ref;
  cert.constants["max_drift"] = drift;
  if (drift >= tol)
    cert.fail_with(traj.states[worst], drift, "conserved functional drifted");
  return cert;
}

Certificate check_lie_nonpositive(const SaddleFunction& f, const SaddleSetDescriptor& set,
                                  double radius, int set_points, int samples_per_point,
                                  uint64_t seed, double slack) {
  Certificate cert;
  cert.check_name = "lie-derivative-nonpositive";
  cert.tolerances["slack"] = slack;
  cert.tolerances["radius"] = radius;
  cert.seed = seed;
  cert.verdict = Verdict::pass;

  Rng rng(seed);
  long samples = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec& theta : param_grid(set, set_points)) {
    Vec y = set.embed(theta);
    auto [x_star, z_star] = split_state(f, y);
    for (int k = 0; k < samples_per_point; ++k) {
      Vec state = guarded_ball_sample(f, rng, y, radius);
      auto [x, z] = split_state(f, state);
      double lie = lie_derivative_V(f, x_star, z_star, x, z);
      worst = std::max(worst, lie);
      ++samples;
      if (lie > slack)
        cert.fail_with(state, lie, "Lie derivative of the LaSalle function is positive");
    }
  }
  cert.samples = samples;
  cert.constants["max_lie_derivative"] = worst;
  return cert;
}

}  // namespace saddlescope
