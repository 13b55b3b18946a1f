#include "saddlescope/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "saddlescope/errors.hpp"

namespace saddlescope {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::t_max: return "t_max";
    case StopReason::blowup: return "blowup";
    case StopReason::domain_error: return "domain_error";
  }
  return "?";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384, 0.0,       500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kErr[7] = {71.0 / 57600,      0.0,        -71.0 / 16695, 71.0 / 1920,
                            -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

constexpr double kEventTimeTol = 1e-12;

struct DomainHit {};  // internal signal: a stage left the admissible domain

class Stepper {
 public:
  Stepper(int dim, std::function<Vec(const Vec&)> eval, std::function<bool(const Vec&)> guard)
      : dim_(dim), eval_(std::move(eval)), guard_(std::move(guard)) {
    for (auto& k : k_) k.assign(dim_, 0.0);
    stage_.assign(dim_, 0.0);
  }

  void set_field(std::function<Vec(const Vec&)> eval, std::function<bool(const Vec&)> guard) {
    eval_ = std::move(eval);
    guard_ = std::move(guard);
  }

  Vec field(const Vec& s) const {
    if (guard_ && !guard_(s)) throw DomainHit{};
    return eval_(s);
  }

  /// One Dormand-Prince step of exactly size h: 5th-order solution plus the
  /// embedded error estimate.
  void dopri_step(const Vec& s, double h, Vec& out, Vec& err) const {
    k_[0] = field(s);
    for (int stage = 1; stage < 7; ++stage) {
      for (int i = 0; i < dim_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < stage; ++j) acc += kA[stage][j] * k_[j][i];
        stage_[i] = s[i] + h * acc;
      }
      k_[stage] = field(stage_);
    }
    out.assign(dim_, 0.0);
    err.assign(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
      double acc = 0.0, eacc = 0.0;
      for (int j = 0; j < 7; ++j) {
        acc += kB5[j] * k_[j][i];
        eacc += kErr[j] * k_[j][i];
      }
      out[i] = s[i] + h * acc;
      err[i] = h * eacc;
    }
  }

  Vec rk4_step(const Vec& s, double h) const {
    Vec k1 = field(s);
    Vec p(dim_);
    for (int i = 0; i < dim_; ++i) p[i] = s[i] + 0.5 * h * k1[i];
    Vec k2 = field(p);
    for (int i = 0; i < dim_; ++i) p[i] = s[i] + 0.5 * h * k2[i];
    Vec k3 = field(p);
    for (int i = 0; i < dim_; ++i) p[i] = s[i] + h * k3[i];
    Vec k4 = field(p);
    Vec out(dim_);
    for (int i = 0; i < dim_; ++i)
      out[i] = s[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  }

  /// Single step without error control, used for bisection inside an already
  /// accepted step.
  Vec substep(const Vec& s, double h, Method method) const {
    if (method == Method::rk4_fixed) return rk4_step(s, h);
    Vec out, err;
    dopri_step(s, h, out, err);
    return out;
  }

 private:
  int dim_;
  std::function<Vec(const Vec&)> eval_;
  std::function<bool(const Vec&)> guard_;
  mutable Vec k_[7];
  mutable Vec stage_;
};

void validate(const IntegratorConfig& cfg) {
  if (cfg.t_max <= 0.0) throw ContractError("integrate: t_max must be positive");
  if (cfg.sample_every <= 0.0) throw ContractError("integrate: sample_every must be positive");
  if (cfg.method == Method::rk4_fixed) {
    if (cfg.dt <= 0.0) throw ContractError("integrate: dt must be positive");
    if (cfg.dt > cfg.t_max) throw ContractError("integrate: dt exceeds t_max");
  } else {
    if (cfg.rtol <= 0.0 || cfg.atol <= 0.0)
      throw ContractError("integrate: adaptive tolerances must be positive");
  }
  if (cfg.stop_field_norm < 0.0) throw ContractError("integrate: stop_field_norm must be >= 0");
}

double inf_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool vec_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Trajectory run_integration(int dim, const PiecewiseField* pw, const VectorField* smooth,
                           const Vec& s0, const IntegratorConfig& cfg) {
  validate(cfg);
  if (static_cast<int>(s0.size()) != dim)
    throw ContractError("integrate: initial state dimension mismatch");

  int active = pw ? pw->active_patch(s0) : -1;
  if (pw && active < 0) throw DomainError(pw->name + ": no patch covers the initial state");

  auto patch_eval = [&](int idx) { return pw->patches[idx].local_field.eval; };
  auto patch_guard = [&](int idx) { return pw->patches[idx].local_field.domain_guard; };

  Stepper stepper(dim, pw ? patch_eval(active) : smooth->eval,
                  pw ? patch_guard(active) : smooth->domain_guard);

  Trajectory traj;
  auto& fnorm = traj.diagnostics["field_norm"];
  auto record = [&](const Vec& state, double time, double norm) {
    traj.times.push_back(time);
    traj.states.push_back(state);
    fnorm.push_back(norm);
  };

  Vec s = s0;
  double t = 0.0;
  double last_norm;
  try {
    last_norm = norm2(stepper.field(s));
  } catch (const DomainHit&) {
    throw DomainError("integrate: initial state violates the domain guard");
  }
  record(s, t, last_norm);
  if (cfg.stop_field_norm > 0.0 && last_norm < cfg.stop_field_norm) {
    traj.stop_reason = StopReason::converged;
    return traj;
  }

  long sample_idx = 0;
  double h_prop = (cfg.method == Method::rk4_fixed)
                      ? cfg.dt
                      : std::min({1e-2, cfg.sample_every, cfg.t_max});
  int stalled_switches = 0;

  while (true) {
    if (t >= cfg.t_max - kEventTimeTol) {
      traj.stop_reason = StopReason::t_max;
      if (traj.times.back() < t) record(s, t, last_norm);
      return traj;
    }
    double next_sample = static_cast<double>(sample_idx + 1) * cfg.sample_every;
    const double t_target = std::min(next_sample, cfg.t_max);
    const double h_cap = t_target - t;
    if (h_cap <= kEventTimeTol) {
      // A boundary event landed (numerically) on the sample grid; the state
      // is already recorded, so just advance the grid.
      ++sample_idx;
      continue;
    }

    double h_used = 0.0;
    bool clipped = false;
    Vec s_new;
    double norm_new = 0.0;
    bool boundary_event = false;
    try {
      if (cfg.method == Method::rk4_fixed) {
        h_used = std::min(cfg.dt, h_cap);
        clipped = (h_used == h_cap);
        s_new = stepper.rk4_step(s, h_used);
      } else {
        int rejections = 0;
        for (;;) {
          double h_try = std::min(h_prop, h_cap);
          if (h_try < 1e-14 * std::max(1.0, std::fabs(t)))
            throw NumericError("integrate: step size underflow");
          Vec err;
          stepper.dopri_step(s, h_try, s_new, err);
          double en;
          if (vec_finite(s_new) && vec_finite(err)) {
            en = 0.0;
            for (int i = 0; i < dim; ++i) {
              double sc = cfg.atol + cfg.rtol * std::max(std::fabs(s[i]), std::fabs(s_new[i]));
              double q = err[i] / sc;
              en += q * q;
            }
            en = std::sqrt(en / dim);
          } else {
            en = std::numeric_limits<double>::infinity();
          }
          if (en <= 1.0) {
            h_used = h_try;
            clipped = (h_try == h_cap);
            double factor =
                (en == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            double grown = h_try * factor;
            h_prop = clipped ? std::max(h_prop, grown) : grown;
            break;
          }
          double factor = std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.1;
          h_prop = h_try * factor;
          if (++rejections > 60) throw NumericError("integrate: too many rejected steps");
        }
      }

      if (pw) {
        const auto& member = pw->patches[active].membership;
        if (member(s_new) < 0.0) {
          double lo = 0.0, hi = h_used;
          if (member(s) <= 0.0) hi = 0.0;  // leaving straight from the boundary
          for (int it = 0; it < 100 && (hi - lo) > kEventTimeTol; ++it) {
            double mid = 0.5 * (lo + hi);
            Vec probe = stepper.substep(s, mid, cfg.method);
            if (member(probe) >= 0.0)
              lo = mid;
            else
              hi = mid;
          }
          if (lo > 0.0) {
            s_new = stepper.substep(s, lo, cfg.method);
            h_used = lo;
            clipped = false;
            boundary_event = true;
            stalled_switches = 0;
          } else {
            if (++stalled_switches > 8)
              throw NumericError(pw->name + ": integration stalled at a patch boundary");
            Vec drift = pw->eval(s);
            Vec nudge = s;
            for (int i = 0; i < dim; ++i) nudge[i] += 1e-10 * drift[i];
            int next_active = pw->active_patch(nudge);
            if (next_active == active)
              throw NumericError(pw->name + ": ambiguous patch assignment at boundary");
            active = next_active;
            stepper.set_field(patch_eval(active), patch_guard(active));
            continue;  // retry the step in the adjacent patch
          }
        } else {
          stalled_switches = 0;
        }
      }

      if (vec_finite(s_new) && inf_norm(s_new) <= cfg.stop_blowup) {
        norm_new = norm2(pw ? pw->eval(s_new) : stepper.field(s_new));
      }
    } catch (const DomainHit&) {
      traj.stop_reason = StopReason::domain_error;
      if (traj.times.back() < t) record(s, t, last_norm);
      return traj;
    }

    t = clipped ? t_target : t + h_used;
    s = s_new;

    if (!vec_finite(s) || inf_norm(s) > cfg.stop_blowup) {
      traj.stop_reason = StopReason::blowup;
      record(s, t, std::numeric_limits<double>::quiet_NaN());
      return traj;
    }
    last_norm = norm_new;

    if (cfg.stop_field_norm > 0.0 && last_norm < cfg.stop_field_norm) {
      traj.stop_reason = StopReason::converged;
      record(s, t, last_norm);
      return traj;
    }

    if (boundary_event) {
      record(s, t, last_norm);
      Vec drift = pw->eval(s);
      Vec nudge = s;
      for (int i = 0; i < dim; ++i) nudge[i] += 1e-10 * drift[i];
      int next_active = pw->active_patch(nudge);
      if (next_active != active) {
        active = next_active;
        stepper.set_field(patch_eval(active), patch_guard(active));
      }
      continue;
    }

    if (t >= next_sample - kEventTimeTol && t <= next_sample + kEventTimeTol) {
      record(s, t, last_norm);
      ++sample_idx;
    }
  }
}

}  // namespace

Trajectory integrate(const VectorField& x, const Vec& s0, const IntegratorConfig& cfg) {
  return run_integration(x.dim, nullptr, &x, s0, cfg);
}

Trajectory integrate_piecewise(const PiecewiseField& p, const Vec& s0,
                               const IntegratorConfig& cfg) {
  if (p.patches.empty()) throw ContractError(p.name + ": piecewise field has no patches");
  return run_integration(p.dim, &p, nullptr, s0, cfg);
}

std::vector<double> monitor(Trajectory& traj, const std::string& name,
                            const std::function<double(const Vec&)>& fn) {
  std::vector<double> series;
  series.reserve(traj.states.size());
  for (const Vec& s : traj.states) series.push_back(fn(s));
  traj.diagnostics[name] = series;
  return series;
}

}  // namespace saddlescope
