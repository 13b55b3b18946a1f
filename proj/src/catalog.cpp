#include <cmath>

#include "saddlescope/errors.hpp"
#include "saddlescope/functions.hpp"

namespace saddlescope {

namespace {

Mat hess_from_blocks(HessBlock block, const Mat& hxx, const Mat& hxz, const Mat& hzz) {
  switch (block) {
    case HessBlock::xx: return hxx;
    case HessBlock::xz: return hxz;
    case HessBlock::zx: return hxz.transposed();
    case HessBlock::zz: return hzz;
  }
  throw ContractError("unknown Hessian block");
}

// Both ring functions have a 1/|x| term in their derivatives.
bool away_from_x_origin(const Vec& x) { return norm2(x) >= 1e-9; }

}  // namespace

SaddleFunction plain_lagrangian() {
  SaddleFunction f;
  f.name = "plain-lagrangian";
  f.n = 3;
  f.m = 1;
  f.smoothness = Smoothness::C3;
  f.value = [](const Vec& x, const Vec& z) {
    double s = x[0] + x[1] + x[2];
    return s * s + z[0] * (x[0] - x[1]);
  };
  f.grad_x = [](const Vec& x, const Vec& z) {
    double s2 = 2.0 * (x[0] + x[1] + x[2]);
    return Vec{s2 + z[0], s2 - z[0], s2};
  };
  f.grad_z = [](const Vec& x, const Vec&) { return Vec{x[0] - x[1]}; };
  f.hess = [](HessBlock b, const Vec&, const Vec&) {
    Mat hxx{{2, 2, 2}, {2, 2, 2}, {2, 2, 2}};
    Mat hxz{{1}, {-1}, {0}};
    Mat hzz{{0}};
    return hess_from_blocks(b, hxx, hxz, hzz);
  };
  return f;
}

SaddleFunction augmented_lagrangian() {
  SaddleFunction f = plain_lagrangian();
  f.name = "augmented-lagrangian";
  f.value = [](const Vec& x, const Vec& z) {
    double s = x[0] + x[1] + x[2];
    double d = x[0] - x[1];
    return s * s + z[0] * d + d * d;
  };
  f.grad_x = [](const Vec& x, const Vec& z) {
    double s2 = 2.0 * (x[0] + x[1] + x[2]);
    double d2 = 2.0 * (x[0] - x[1]);
    return Vec{s2 + z[0] + d2, s2 - z[0] - d2, s2};
  };
  f.hess = [](HessBlock b, const Vec&, const Vec&) {
    Mat hxx{{4, 0, 2}, {0, 4, 2}, {2, 2, 2}};
    Mat hxz{{1}, {-1}, {0}};
    Mat hzz{{0}};
    return hess_from_blocks(b, hxx, hxz, hzz);
  };
  return f;
}

SaddleFunction quasi_function() {
  SaddleFunction f;
  f.name = "quasi";
  f.n = 1;
  f.m = 1;
  f.smoothness = Smoothness::C3;
  f.value = [](const Vec& x, const Vec& z) {
    return (2.0 - std::exp(-x[0] * x[0])) * (1.0 + std::exp(-z[0] * z[0]));
  };
  f.grad_x = [](const Vec& x, const Vec& z) {
    return Vec{2.0 * x[0] * std::exp(-x[0] * x[0]) * (1.0 + std::exp(-z[0] * z[0]))};
  };
  f.grad_z = [](const Vec& x, const Vec& z) {
    return Vec{-2.0 * z[0] * std::exp(-z[0] * z[0]) * (2.0 - std::exp(-x[0] * x[0]))};
  };
  f.hess = [](HessBlock b, const Vec& x, const Vec& z) {
    double ex = std::exp(-x[0] * x[0]);
    double ez = std::exp(-z[0] * z[0]);
    Mat hxx{{2.0 * (1.0 - 2.0 * x[0] * x[0]) * ex * (1.0 + ez)}};
    Mat hxz{{-4.0 * x[0] * z[0] * ex * ez}};
    Mat hzz{{(4.0 * z[0] * z[0] - 2.0) * ez * (2.0 - ex)}};
    return hess_from_blocks(b, hxx, hxz, hzz);
  };
  return f;
}

SaddleFunction ring_lagrangian() {
  SaddleFunction f;
  f.name = "ring-lagrangian";
  f.n = 3;
  f.m = 1;
  f.smoothness = Smoothness::C3;
  f.domain_guard = [](const Vec& x, const Vec&) { return away_from_x_origin(x); };
  f.value = [](const Vec& x, const Vec& z) {
    double r = norm2(x);
    return (r - 1.0) * (r - 1.0) + z[0] * (x[2] - 0.5);
  };
  f.grad_x = [](const Vec& x, const Vec& z) {
    double c = 2.0 * (1.0 - 1.0 / norm2(x));
    return Vec{c * x[0], c * x[1], c * x[2] + z[0]};
  };
  f.grad_z = [](const Vec& x, const Vec&) { return Vec{x[2] - 0.5}; };
  f.hess = [](HessBlock b, const Vec& x, const Vec&) {
    double r = norm2(x);
    Mat hxx(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double u = x[i] * x[j] / (r * r);
        double id = (i == j) ? 1.0 : 0.0;
        hxx(i, j) = 2.0 * id - (2.0 / r) * (id - u);
      }
    Mat hxz{{0}, {0}, {1}};
    Mat hzz{{0}};
    return hess_from_blocks(b, hxx, hxz, hzz);
  };
  return f;
}

SaddleFunction quartic_ring() {
  SaddleFunction f;
  f.name = "quartic-ring";
  f.n = 2;
  f.m = 1;
  f.smoothness = Smoothness::C3;
  f.domain_guard = [](const Vec& x, const Vec&) { return away_from_x_origin(x); };
  f.value = [](const Vec& x, const Vec& z) {
    double r = norm2(x);
    double d = r - 1.0;
    return d * d * d * d - z[0] * z[0] * r * r;
  };
  f.grad_x = [](const Vec& x, const Vec& z) {
    double r = norm2(x);
    double c = 4.0 * std::pow(r - 1.0, 3) / r - 2.0 * z[0] * z[0];
    return Vec{c * x[0], c * x[1]};
  };
  f.grad_z = [](const Vec& x, const Vec& z) {
    double r = norm2(x);
    return Vec{-2.0 * z[0] * r * r};
  };
  f.hess = [](HessBlock b, const Vec& x, const Vec& z) {
    double r = norm2(x);
    double d = r - 1.0;
    Mat hxx(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double u = x[i] * x[j] / (r * r);
        double id = (i == j) ? 1.0 : 0.0;
        hxx(i, j) = 12.0 * d * d * u + 4.0 * d * d * d * (id - u) / r -
                    2.0 * z[0] * z[0] * id;
      }
    Mat hxz{{-4.0 * z[0] * x[0]}, {-4.0 * z[0] * x[1]}};
    Mat hzz{{-2.0 * r * r}};
    return hess_from_blocks(b, hxx, hxz, hzz);
  };
  return f;
}

SaddleFunction xz_squared() {
  SaddleFunction f;
  f.name = "xz-squared";
  f.n = 1;
  f.m = 1;
  f.smoothness = Smoothness::C3;
  f.value = [](const Vec& x, const Vec& z) { return x[0] * z[0] * z[0]; };
  f.grad_x = [](const Vec&, const Vec& z) { return Vec{z[0] * z[0]}; };
  f.grad_z = [](const Vec& x, const Vec& z) { return Vec{2.0 * x[0] * z[0]}; };
  f.hess = [](HessBlock b, const Vec& x, const Vec& z) {
    Mat hxx{{0}};
    Mat hxz{{2.0 * z[0]}};
    Mat hzz{{2.0 * x[0]}};
    return hess_from_blocks(b, hxx, hxz, hzz);
  };
  return f;
}

const std::vector<SaddleFunction>& builtin_functions() {
  static const std::vector<SaddleFunction> all = {
      plain_lagrangian(), augmented_lagrangian(), quasi_function(),
      ring_lagrangian(),  quartic_ring(),         xz_squared(),
  };
  return all;
}

}  // namespace saddlescope
