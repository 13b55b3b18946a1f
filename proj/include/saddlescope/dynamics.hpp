#pragma once

/**
 * Vector fields: the descent-ascent field of a saddle function, its Jacobian
 * assembled from Hessian blocks, and continuous piecewise-C2 fields given by
 * patches with per-patch extended smooth fields.
 */

#include <functional>
#include <string>
#include <vector>

#include "saddlescope/functions.hpp"
#include "saddlescope/linalg.hpp"

namespace saddlescope {

struct VectorField {
  std::string name;
  int dim = 0;
  std::function<Vec(const Vec&)> eval;
  std::function<Mat(const Vec&)> jacobian;  // optional
  std::function<bool(const Vec&)> domain_guard;  // optional; true = admissible
};

/// One patch of a piecewise field: a signed membership function (positive
/// inside the open patch, zero on its boundary) and a smooth local field
/// defined on an open superset of the patch closure.
struct Patch {
  std::function<double(const Vec&)> membership;
  VectorField local_field;
};

struct PiecewiseField {
  std::string name;
  int dim = 0;
  std::vector<Patch> patches;
  double continuity_tol = 1e-9;

  /// Index of the patch with the largest membership value at `state`
  /// (the patch whose closure the point most interiorly belongs to).
  int active_patch(const Vec& state) const;

  /// Global field value via the active patch.
  Vec eval(const Vec& state) const;
};

/// The flow (dx, dz) = (-grad_x F, grad_z F) on the stacked state (x; z).
/// The Jacobian is available when F is at least C2.
VectorField saddle_field(const SaddleFunction& f, const FiniteDiffConfig& fd = {});

/// Jacobian of the field at a state. CapabilityError when the field carries
/// no Jacobian provider; DomainError when the guard rejects the state.
Mat jacobian_at(const VectorField& x, const Vec& state);

/// One matrix per patch whose closure contains `state`: the Jacobian of that
/// patch's extended field there, deduplicated to 1e-9 in Frobenius norm.
/// DomainError when the state lies in no patch closure.
std::vector<Mat> limit_jacobians(const PiecewiseField& p, const Vec& state,
                                 double closure_tol = 1e-9);

/// The two-patch benchmark field on R^3 split along x1 = x3, with a linear
/// part per patch plus a quadratic (resp. cubic-corrected) coupling term.
/// Its equilibria form the line x1 = x2 = x3.
PiecewiseField patchy_field();

/// Helpers exposing the patchy field's per-patch data for analysis.
Mat patchy_linear_part(int patch_index);
Mat patchy_transform_q();

}  // namespace saddlescope
