#pragma once

/**
 * Saddle functions F(x, z) with value, gradient and Hessian-block providers,
 * either analytic or by central finite differences, plus the built-in
 * catalog of test functions.
 */

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "saddlescope/certificate.hpp"
#include "saddlescope/linalg.hpp"

namespace saddlescope {

enum class Smoothness { C1, C2, C3 };
enum class Arg { x, z };
enum class HessBlock { xx, xz, zx, zz };

std::string to_string(HessBlock b);

struct FiniteDiffConfig {
  double step_abs = 1e-6;  // must be > 0
  double step_rel = 1e-7;
  // Gradients use 2nd-order central differences with
  // h = step_abs + step_rel * |coordinate|; Hessians use central differences
  // of analytic gradients when available, else nested central differences
  // with h' = sqrt(step_abs).
};

/// A function of two vector arguments together with whatever derivative
/// information the author supplies. Immutable after construction; safe to
/// share between threads.
struct SaddleFunction {
  std::string name;
  int n = 0;  // dimension of x
  int m = 0;  // dimension of z
  std::function<double(const Vec& x, const Vec& z)> value;
  std::function<Vec(const Vec&, const Vec&)> grad_x;  // optional
  std::function<Vec(const Vec&, const Vec&)> grad_z;  // optional
  std::function<Mat(HessBlock, const Vec&, const Vec&)> hess;  // optional
  Smoothness smoothness = Smoothness::C2;
  std::function<bool(const Vec&, const Vec&)> domain_guard;  // optional; true = admissible
};

/// F(x, z). Throws DomainError when the guard rejects the point.
double eval(const SaddleFunction& f, const Vec& x, const Vec& z);

/// Gradient with respect to one argument; analytic provider if present,
/// central finite differences otherwise. Non-finite entries raise
/// NumericError naming the offending coordinate.
Vec grad(const SaddleFunction& f, Arg arg, const Vec& x, const Vec& z,
         const FiniteDiffConfig& fd = {});

/// Second-derivative block; hess(xz) is n x m with entries d2F/dx_i dz_j.
/// Requires smoothness >= C2 (CapabilityError otherwise).
Mat hess_block(const SaddleFunction& f, HessBlock block, const Vec& x, const Vec& z,
               const FiniteDiffConfig& fd = {});

/// Cross-checks analytic gradients (and Hessian blocks when present) against
/// finite differences at the given points; failures are reported, not thrown.
Certificate fd_validate(const SaddleFunction& f, const std::vector<std::pair<Vec, Vec>>& points,
                        double tol, const FiniteDiffConfig& fd = {});

// Built-in catalog. All six carry exact closed-form derivatives; finite
// differences serve only as the cross-check.
SaddleFunction plain_lagrangian();       // (x1+x2+x3)^2 + z (x1 - x2)
SaddleFunction augmented_lagrangian();   // plain + (x1 - x2)^2
SaddleFunction quasi_function();         // (2 - e^{-x^2})(1 + e^{-z^2})
SaddleFunction ring_lagrangian();        // (|x| - 1)^2 + z (x3 - 0.5), guarded at x = 0
SaddleFunction quartic_ring();           // (|x| - 1)^4 - z^2 |x|^2, guarded at x = 0
SaddleFunction xz_squared();             // x z^2

const std::vector<SaddleFunction>& builtin_functions();

}  // namespace saddlescope
