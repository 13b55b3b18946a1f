#pragma once

/**
 * Numerical verification of the stability hypotheses: criticality and
 * definiteness at candidate saddle points, convexity-concavity and linearity
 * over sampled neighborhoods, strong quasiconvexity fits, spectral reports
 * for smooth and piecewise fields, proximal-normal growth bounds, and
 * distance diagnostics along trajectories.
 *
 * Every check is sampling-based with a fixed seed: "pass" means no violation
 * was found at the stated sample size, and the sampling parameters are part
 * of the certificate.
 */

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "saddlescope/certificate.hpp"
#include "saddlescope/dynamics.hpp"
#include "saddlescope/functions.hpp"
#include "saddlescope/integrate.hpp"
#include "saddlescope/linalg.hpp"

namespace saddlescope {

/// A parametrized closed set of saddle (or equilibrium) points with
/// projection, distance and proximal-normal generators.
struct SaddleSetDescriptor {
  std::string name;
  int ambient_dim = 0;
  int param_dim = 0;
  std::function<Vec(const Vec& theta)> embed;
  std::vector<std::pair<double, double>> param_box;  // sampling domain for theta
  std::function<std::vector<Vec>(const Vec&)> project;  // nearest set points
  std::function<double(const Vec&)> distance;
  /// Unit proximal normal at a set point; dir_spec selects a direction in
  /// the normal space and is normalized internally.
  std::function<Vec(const Vec& set_point, const Vec& dir_spec)> normal_at;
  int normal_spec_dim = 0;
};

// Closed-form descriptors for the catalog sets.
SaddleSetDescriptor line_set(const std::string& name, const Vec& direction, double param_range);
SaddleSetDescriptor point_set(const std::string& name, const Vec& point);
/// Circle x1^2 + x2^2 = radius^2 in the first two coordinates, remaining
/// coordinates pinned to `fixed_tail` (e.g. {0.5, 0} or {0}).
SaddleSetDescriptor circle_set(const std::string& name, double radius, const Vec& fixed_tail);
/// Half line {(t, 0) : t <= 0} in the plane.
SaddleSetDescriptor halfline_set(const std::string& name, double param_range);

struct NeighborhoodSpec {
  Vec center;
  double radius = 1.0;
  int samples = 200;
  uint64_t seed = 1;
};

/// Scalar slice of a saddle function along one argument, used by the
/// quasiconvexity checks. For concavity checks build the negated slice.
struct SliceFunction {
  int dim = 0;
  Vec center;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

SliceFunction x_slice(const SaddleFunction& f, const Vec& z_fixed, const Vec& x_center,
                      bool negate = false);
SliceFunction z_slice(const SaddleFunction& f, const Vec& x_fixed, const Vec& z_center,
                      bool negate = false);

// --- point and neighborhood checks -----------------------------------------

/// Gradients vanish and the Hessian blocks carry the min-max signs
/// (xx-block positive semidefinite, zz-block negative semidefinite).
Certificate check_critical(const SaddleFunction& f, const Vec& x, const Vec& z, double tol);

/// Sampled convexity in x / concavity in z over a neighborhood; with
/// `strict`, additionally PD in x or ND in z on the center slices.
Certificate check_convex_concave(const SaddleFunction& f, const NeighborhoodSpec& nbhd,
                                 bool strict, double def_tol = 1e-9);

/// zz-block vanishes and grad_z is independent of z across paired samples.
Certificate check_linearity_in_z(const SaddleFunction& f, const NeighborhoodSpec& nbhd,
                                 double tol = 1e-8);

/// Fits the largest s with max{f(u),f(v)} - f(lu+(1-l)v) >= s l(1-l)|u-v|^2
/// over sampled triples; passes when the fit is at least s_min.
Certificate check_strong_quasi(const SliceFunction& slice, const NeighborhoodSpec& nbhd,
                               double s_min);

/// First-order strong quasiconvexity: f(x) <= f(y) implies
/// grad f(y)'(x-y) <= -s |x-y|^2 (up to 1e-9 slack) on sampled pairs.
Certificate check_first_order_quasi(const SliceFunction& slice, const NeighborhoodSpec& nbhd,
                                    double s);

/// F is constant over the sampled set; when expected_value is given the
/// common value must also match it within tol.
Certificate check_constant_on_set(const SaddleFunction& f, const SaddleSetDescriptor& set,
                                  int samples, double tol, uint64_t seed,
                                  std::optional<double> expected_value = std::nullopt);

/// Sampled form of "equal value on the x-slice implies membership in the
/// saddle set": every sample with F(x, z*) = F(x*, z*) (within value_tol)
/// must lie within dist_tol of the set.
Certificate check_value_implies_saddle(const SaddleFunction& f, const SaddleSetDescriptor& set,
                                       const Vec& x_star, const Vec& z_star,
                                       const NeighborhoodSpec& nbhd, double value_tol,
                                       double dist_tol);

// --- spectral checks --------------------------------------------------------

/// Eigenvalue report at an equilibrium of a smooth field: zero eigenvalue of
/// multiplicity exactly p (semisimple, by a rank test), every other
/// eigenvalue with real part < -tol_zero.
Certificate spectrum_report(const VectorField& field, const Vec& state, int p);

/// Same conditions imposed on every limit Jacobian of a piecewise field.
Certificate spectrum_report(const PiecewiseField& field, const Vec& state, int p);

/// Linearity in z plus trivial range/null intersection of the Hessian
/// blocks, the sufficient condition for no nonzero imaginary eigenvalues.
Certificate check_lemma_eigenvalue(const SaddleFunction& f, const Vec& x, const Vec& z);

/// Pass means "instability indicated": some Jacobian eigenvalue has real
/// part above the zero threshold.
Certificate instability_indicator(const VectorField& field, const Vec& equilibrium);

// --- proximal-normal checks -------------------------------------------------

struct ProximalConstants {
  double k1 = 1.0, alpha1 = 2.0;   // lower growth of F along x-normals
  double k2 = 1.0, beta1 = 2.0;    // upper decay of F along z-normals
  double l_x = 0.0, alpha2 = 0.0;  // mixed-Hessian variation bound, x part
  double l_z = 0.0, beta2 = 0.0;   // mixed-Hessian variation bound, z part
};

struct ProximalGrids {
  int set_samples = 12;
  int normal_samples = 16;
  int lambda_samples = 12;
  int t_samples = 6;
  uint64_t seed = 7;
};

/// Convexity/concavity of the two scalar slices along sampled unit proximal
/// normals, the polynomial growth bounds with the supplied constants, the
/// mixed-Hessian variation bound, and the exponent compatibility conditions.
/// The x-split of the state is (n, ambient - n).
Certificate check_proximal_hypotheses(const SaddleFunction& f, const SaddleSetDescriptor& set,
                                      double lambda_max, const ProximalConstants& constants,
                                      const ProximalGrids& grids);

// --- trajectory checks ------------------------------------------------------

/// -(x - x*)' grad_x F(x,z) + (z - z*)' grad_z F(x,z).
double lie_derivative_V(const SaddleFunction& f, const Vec& x_star, const Vec& z_star,
                        const Vec& x, const Vec& z);

/// Distance-to-set series along a trajectory: nonincreasing up to
/// 1e-6 (1 + d(0)) slack (unless require_monotone is false) and final value
/// below final_tol.
Certificate distance_diagnostics(const Trajectory& traj, const SaddleSetDescriptor& set,
                                 bool require_monotone = true, double final_tol = 1e-3);

/// Hypotheses for saddle functions of the form F(x, z) = g(z)' x at a
/// candidate (x*, z*): F(x*, z) <= F(x*, z*) over the z-grid, and
/// g(z)'x* = 0 forcing g(z) = 0. Boundedness of trajectories is recorded as
/// an assumption, not verified here.
Certificate check_linear_in_x_hypotheses(const SaddleFunction& f, const Vec& x_star,
                                         const Vec& z_star, double z_range, int grid,
                                         double tol = 1e-9, double tol_g = 1e-6);

/// Max drift of a conserved functional along a trajectory.
Certificate check_conserved(const Trajectory& traj, const std::string& label,
                            const std::function<double(const Vec&)>& fn, double tol);

/// Lie derivative of the squared-distance LaSalle function is nonpositive at
/// sampled states around sampled set points (up to `slack`).
Certificate check_lie_nonpositive(const SaddleFunction& f, const SaddleSetDescriptor& set,
                                  double radius, int set_points, int samples_per_point,
                                  uint64_t seed, double slack = 1e-12);

}  // namespace saddlescope
