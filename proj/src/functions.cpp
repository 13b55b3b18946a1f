#include "saddlescope/functions.hpp"

#include <cmath>
#include <string>

#include "saddlescope/errors.hpp"

namespace saddlescope {

std::string to_string(HessBlock b) {
  switch (b) {
    case HessBlock::xx: return "xx";
    case HessBlock::xz: return "xz";
    case HessBlock::zx: return "zx";
    case HessBlock::zz: return "zz";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

void Certificate::fail_with(const std::vector<double>& point, double violation,
                            const std::string& what) {
  verdict = Verdict::fail;
  if (!worst_witness || violation > worst_witness->violation)
    worst_witness = Witness{point, violation, what};
}

namespace {

void check_dims(const SaddleFunction& f, const Vec& x, const Vec& z) {
  if (static_cast<int>(x.size()) != f.n || static_cast<int>(z.size()) != f.m)
    throw ContractError(f.name + ": argument dimensions do not match (n,m)");
}

void check_guard(const SaddleFunction& f, const Vec& x, const Vec& z) {
  if (f.domain_guard && !f.domain_guard(x, z))
    throw DomainError(f.name + ": point violates the domain guard");
}

double fd_step(const FiniteDiffConfig& fd, double coord) {
  return fd.step_abs + fd.step_rel * std::fabs(coord);
}

Vec fd_gradient(const SaddleFunction& f, Arg arg, const Vec& x, const Vec& z,
                const FiniteDiffConfig& fd) {
  const Vec& base = (arg == Arg::x) ? x : z;
  Vec g(base.size());
  Vec per = base;
  for (size_t i = 0; i < base.size(); ++i) {
    const double h = fd_step(fd, base[i]);
    per[i] = base[i] + h;
    double fp = (arg == Arg::x) ? eval(f, per, z) : eval(f, x, per);
    per[i] = base[i] - h;
    double fm = (arg == Arg::x) ? eval(f, per, z) : eval(f, x, per);
    per[i] = base[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

void check_finite(const Vec& v, const std::string& who) {
  for (size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw NumericError(who + ": non-finite result at coordinate " + std::to_string(i));
}

void check_finite(const Mat& m, const std::string& who) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j)))
        throw NumericError(who + ": non-finite entry at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
}

}  // namespace

double eval(const SaddleFunction& f, const Vec& x, const Vec& z) {
  check_dims(f, x, z);
  check_guard(f, x, z);
  double v = f.value(x, z);
  if (!std::isfinite(v)) throw NumericError(f.name + ": non-finite value");
  return v;
}

Vec grad(const SaddleFunction& f, Arg arg, const Vec& x, const Vec& z,
         const FiniteDiffConfig& fd) {
  if (fd.step_abs <= 0.0) throw ContractError("grad: step_abs must be positive");
  check_dims(f, x, z);
  check_guard(f, x, z);
  Vec g;
  if (arg == Arg::x && f.grad_x) {
    g = f.grad_x(x, z);
  } else if (arg == Arg::z && f.grad_z) {
    g = f.grad_z(x, z);
  } else {
    g = fd_gradient(f, arg, x, z, fd);
  }
  check_finite(g, f.name + " grad " + (arg == Arg::x ? "x" : "z"));
  return g;
}

Mat hess_block(const SaddleFunction& f, HessBlock block, const Vec& x, const Vec& z,
               const FiniteDiffConfig& fd) {
  check_dims(f, x, z);
  check_guard(f, x, z);
  if (f.smoothness == Smoothness::C1)
    throw CapabilityError(f.name + ": Hessian requested but function is only C1");
  if (f.hess) {
    Mat h = f.hess(block, x, z);
    check_finite(h, f.name + " hess " + to_string(block));
    return h;
  }
  // Differentiate analytic gradients when present, else nest central
  // differences of the value with the wider step.
  const bool have_grads = static_cast<bool>(f.grad_x) && static_cast<bool>(f.grad_z);
  FiniteDiffConfig inner = fd;
  if (!have_grads) inner.step_abs = std::sqrt(fd.step_abs);

  const Arg grad_arg = (block == HessBlock::xx || block == HessBlock::xz) ? Arg::x : Arg::z;
  const Arg diff_arg = (block == HessBlock::xx || block == HessBlock::zx) ? Arg::x : Arg::z;
  const Vec& diff_base = (diff_arg == Arg::x) ? x : z;
  const int rows = (grad_arg == Arg::x) ? f.n : f.m;
  const int cols = static_cast<int>(diff_base.size());

  Mat h(rows, cols);
  Vec per = diff_base;
  for (int j = 0; j < cols; ++j) {
    const double step = inner.step_abs + inner.step_rel * std::fabs(diff_base[j]);
    per[j] = diff_base[j] + step;
    Vec gp = (diff_arg == Arg::x) ? grad(f, grad_arg, per, z, inner) : grad(f, grad_arg, x, per, inner);
    per[j] = diff_base[j] - step;
    Vec gm = (diff_arg == Arg::x) ? grad(f, grad_arg, per, z, inner) : grad(f, grad_arg, x, per, inner);
    per[j] = diff_base[j];
    for (int i = 0; i < rows; ++i) h(i, j) = (gp[i] - gm[i]) / (2.0 * step);
  }
  check_finite(h, f.name + " hess " + to_string(block));
  return h;
}

Certificate fd_validate(const SaddleFunction& f, const std::vector<std::pair<Vec, Vec>>& points,
                        double tol, const FiniteDiffConfig& fd) {
  Certificate cert;
  cert.check_name = "fd-validate:" + f.name;
  cert.tolerances["tol"] = tol;
  cert.samples = static_cast<long>(points.size());
  cert.verdict = Verdict::pass;

  auto relative_gap = [](double a, double b) {
    return std::fabs(a - b) / (1.0 + std::max(std::fabs(a), std::fabs(b)));
  };

  for (const auto& [x, z] : points) {
    Vec state = x;
    state.insert(state.end(), z.begin(), z.end());
    for (Arg arg : {Arg::x, Arg::z}) {
      const bool analytic = (arg == Arg::x) ? static_cast<bool>(f.grad_x) : static_cast<bool>(f.grad_z);
      if (!analytic) continue;
      Vec ga = (arg == Arg::x) ? f.grad_x(x, z) : f.grad_z(x, z);
      Vec gf = fd_gradient(f, arg, x, z, fd);
      for (size_t i = 0; i < ga.size(); ++i) {
        double gap = relative_gap(ga[i], gf[i]);
        if (gap > tol)
          cert.fail_with(state, gap,
                         "grad_" + std::string(arg == Arg::x ? "x" : "z") + "[" +
                             std::to_string(i) + "] analytic vs finite differences");
      }
    }
    if (f.hess && f.smoothness != Smoothness::C1) {
      SaddleFunction no_hess = f;
      no_hess.hess = nullptr;
      for (HessBlock b : {HessBlock::xx, HessBlock::xz, HessBlock::zx, HessBlock::zz}) {
        Mat ha = f.hess(b, x, z);
        Mat hf = hess_block(no_hess, b, x, z, fd);
        for (int i = 0; i < ha.rows(); ++i)
          for (int j = 0; j < ha.cols(); ++j) {
            double gap = relative_gap(ha(i, j), hf(i, j));
            // Nested differences carry more noise than gradient checks.
            if (gap > std::max(tol, 1e-4))
              cert.fail_with(state, gap, "hess " + to_string(b) + " analytic vs finite differences");
          }
      }
    }
  }
  return cert;
}

}  // namespace saddlescope
