#include "saddlescope/dynamics.hpp"

#include <cmath>

#include "saddlescope/errors.hpp"

namespace saddlescope {

VectorField saddle_field(const SaddleFunction& f, const FiniteDiffConfig& fd) {
  VectorField vf;
  vf.name = "saddle-field:" + f.name;
  vf.dim = f.n + f.m;
  const int n = f.n;
  const int m = f.m;
  auto split = [n, m](const Vec& state) {
    Vec x(state.begin(), state.begin() + n);
    Vec z(state.begin() + n, state.begin() + n + m);
    return std::make_pair(x, z);
  };
  if (f.domain_guard) {
    vf.domain_guard = [f, split](const Vec& state) {
      auto [x, z] = split(state);
      return f.domain_guard(x, z);
    };
  }
  vf.eval = [f, fd, split, n, m](const Vec& state) {
    auto [x, z] = split(state);
    Vec gx = grad(f, Arg::x, x, z, fd);
    Vec gz = grad(f, Arg::z, x, z, fd);
    Vec out(n + m);
    for (int i = 0; i < n; ++i) out[i] = -gx[i];
    for (int j = 0; j < m; ++j) out[n + j] = gz[j];
    return out;
  };
  if (f.smoothness != Smoothness::C1) {
    vf.jacobian = [f, fd, split, n, m](const Vec& state) {
      auto [x, z] = split(state);
      Mat hxx = hess_block(f, HessBlock::xx, x, z, fd);
      Mat hxz = hess_block(f, HessBlock::xz, x, z, fd);
      Mat hzx = hess_block(f, HessBlock::zx, x, z, fd);
      Mat hzz = hess_block(f, HessBlock::zz, x, z, fd);
      Mat jac(n + m, n + m);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) jac(i, j) = -hxx(i, j);
        for (int j = 0; j < m; ++j) jac(i, n + j) = -hxz(i, j);
      }
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) jac(n + i, j) = hzx(i, j);
        for (int j = 0; j < m; ++j) jac(n + i, n + j) = hzz(i, j);
      }
      return jac;
    };
  }
  return vf;
}

Mat jacobian_at(const VectorField& x, const Vec& state) {
  if (static_cast<int>(state.size()) != x.dim)
    throw ContractError(x.name + ": state dimension mismatch");
  if (x.domain_guard && !x.domain_guard(state))
    throw DomainError(x.name + ": state violates the domain guard");
  if (!x.jacobian)
    throw CapabilityError(x.name + ": field carries no Jacobian provider");
  return x.jacobian(state);
}

int PiecewiseField::active_patch(const Vec& state) const {
  int best = -1;
  double best_membership = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < patches.size(); ++i) {
    double m = patches[i].membership(state);
    if (m > best_membership) {
      best_membership = m;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Vec PiecewiseField::eval(const Vec& state) const {
  int i = active_patch(state);
  if (i < 0) throw DomainError(name + ": no patch covers the state");
  return patches[i].local_field.eval(state);
}

std::vector<Mat> limit_jacobians(const PiecewiseField& p, const Vec& state,
                                 double closure_tol) {
  std::vector<Mat> out;
  for (const Patch& patch : p.patches) {
    if (patch.membership(state) < -closure_tol) continue;
    Mat jac = jacobian_at(patch.local_field, state);
    bool duplicate = false;
    for (const Mat& seen : out) {
      if (frobenius_norm(jac - seen) < 1e-9) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.push_back(jac);
  }
  if (out.empty())
    throw DomainError(p.name + ": state lies in no patch closure");
  return out;
}

namespace {

const Mat kPatchyA1{{-1, 1, 0}, {1, -2, 1}, {0, 1, -1}};
const Mat kPatchyA2{{-2, 1, 1}, {1, -2, 1}, {1, 1, -2}};

}  // namespace

Mat patchy_linear_part(int patch_index) {
  if (patch_index == 0) return kPatchyA1;
  if (patch_index == 1) return kPatchyA2;
  throw ContractError("patchy_linear_part: patch index out of range");
}

Mat patchy_transform_q() {
  return Mat{{1, 1, 1}, {1, -1, 1}, {1, 0, -2}};
}

PiecewiseField patchy_field() {
  PiecewiseField p;
  p.name = "patchy";
  p.dim = 3;
  p.continuity_tol = 1e-9;

  VectorField f1;
  f1.name = "patchy:branch1";
  f1.dim = 3;
  f1.eval = [](const Vec& x) {
    Vec y = matvec(kPatchyA1, x);
    double w = x[0] - x[2];
    double c = w * w;
    for (double& yi : y) yi += c;
    return y;
  };
  f1.jacobian = [](const Vec& x) {
    Mat j = kPatchyA1;
    double w = x[0] - x[2];
    for (int i = 0; i < 3; ++i) {
      j(i, 0) += 2.0 * w;
      j(i, 2) -= 2.0 * w;
    }
    return j;
  };

  VectorField f2;
  f2.name = "patchy:branch2";
  f2.dim = 3;
  f2.eval = [](const Vec& x) {
    Vec y = matvec(kPatchyA2, x);
    double w = x[0] - x[2];
    double c = w * w * (1.0 - w);
    for (double& yi : y) yi += c;
    return y;
  };
  f2.jacobian = [](const Vec& x) {
    Mat j = kPatchyA2;
    double w = x[0] - x[2];
    double dc = 2.0 * w - 3.0 * w * w;
    for (int i = 0; i < 3; ++i) {
      j(i, 0) += dc;
      j(i, 2) -= dc;
    }
    return j;
  };

  p.patches.push_back({[](const Vec& x) { return x[0] - x[2]; }, f1});
  p.patches.push_back({[](const Vec& x) { return x[2] - x[0]; }, f2});
  return p;
}

}  // namespace saddlescope
