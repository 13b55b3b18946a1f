#pragma once

/**
 * Small dense matrix analysis: eigenvalues via Hessenberg reduction plus
 * implicit double-shift QR, symmetric eigendecomposition via cyclic Jacobi,
 * definiteness classification, Lyapunov residuals, congruence/similarity
 * transforms and range/null intersections.
 *
 * Everything here targets matrices of dimension <= 16; no attempt is made
 * to be efficient beyond that regime.
 */

#include <complex>
#include <initializer_list>
#include <vector>

#include "saddlescope/errors.hpp"

namespace saddlescope {

using Vec = std::vector<double>;

double norm2(const Vec& v);
double dot(const Vec& a, const Vec& b);

/// Dense row-major matrix.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(int n);
  static Mat diag(const Vec& d);
  static Mat outer(const Vec& a, const Vec& b);
  static Mat column(const Vec& a);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[i * cols_ + j]; }
  double operator()(int i, int j) const { return data_[i * cols_ + j]; }

  Mat transposed() const;
  Vec column_vec(int j) const;

  bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Vec matvec(const Mat& a, const Vec& x);

double frobenius_norm(const Mat& a);
double max_abs(const Mat& a);
bool all_finite(const Mat& a);
bool is_symmetric(const Mat& a, double tol);

/// Eigenvalue report for a real square matrix.
struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  double tol_zero = 0.0;        // threshold used for the zero classification
  int zero_multiplicity = 0;    // count of eigenvalues with |lambda| < tol_zero
  double max_real_part_nonzero = 0.0;  // over eigenvalues with |lambda| >= tol_zero
  bool has_nonzero = false;
};

/// All eigenvalues of a real square matrix (dim <= 16).
/// tol_zero <= 0 selects the scale-aware default 1e-7 * (1 + spectral radius).
/// Throws NumericError if the QR iteration fails to converge.
Spectrum eigenvalues(const Mat& a, double tol_zero = 0.0);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; eigenvectors returned as columns of `vectors`.
void symmetric_eigen(const Mat& s, Vec& values, Mat& vectors);

/// Singular values (descending), computed from the symmetric
/// eigendecomposition of A^T A.
Vec singular_values(const Mat& a);

/// Numerical rank: number of singular values above tol.
int numerical_rank(const Mat& a, double tol);

/// Largest singular value (2-norm of the matrix).
double spectral_norm(const Mat& a);

enum class Definiteness { PD, PSD, ND, NSD, Indefinite };

struct DefinitenessResult {
  Definiteness tag = Definiteness::Indefinite;
  bool zero_matrix = false;  // all eigenvalues within tol of zero
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// Classify a symmetric matrix by the signs of its eigenvalues with
/// threshold tol. The zero matrix reports PSD with zero_matrix set.
/// Throws ContractError when the input is not symmetric to 1e-9 scale.
DefinitenessResult definiteness(const Mat& s, double tol);

bool is_psd_like(const DefinitenessResult& d);  // PD, PSD, or zero matrix
bool is_nsd_like(const DefinitenessResult& d);  // ND, NSD, or zero matrix

/// lambda_max(Atil^T P + P Atil); a negative value certifies the strict
/// Lyapunov inequality. P must be symmetric positive definite.
double lyapunov_residual(const Mat& atil, const Mat& p);

struct BlockTransformResult {
  Mat printed;      // Q^T A Q with Q exactly as given
  Mat normalized;   // Qhat^T A Qhat with unit columns; a similarity transform
  bool zero_block_ok = false;  // leading p rows/cols vanish in both products
  Mat trailing_block;          // lower-right (n-p)x(n-p) block of `normalized`
};

/// Congruence/similarity transform used for the common-kernel reduction.
/// Q must have pairwise orthogonal nonzero columns (checked to 1e-8 scale);
/// spectral claims should be made on `normalized` / `trailing_block`.
BlockTransformResult block_transform(const Mat& q, const Mat& a, int p);

/// Orthonormal basis (possibly empty) of range(B) /\ null(A), computed by a
/// rank-revealing factorization of the stacked constraint system.
std::vector<Vec> range_null_intersection(const Mat& b, const Mat& a, double tol);

}  // namespace saddlescope
