#include "saddlescope/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace saddlescope {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();

double sign_with(double magnitude, double sign_of) {
  return sign_of >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}
}  // namespace

double norm2(const Vec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_)
      throw ContractError("Mat: ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(const Vec& d) {
  Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

Mat Mat::outer(const Vec& a, const Vec& b) {
  Mat m(static_cast<int>(a.size()), static_cast<int>(b.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = a[i] * b[j];
  return m;
}

Mat Mat::column(const Vec& a) {
  Mat m(static_cast<int>(a.size()), 1);
  for (size_t i = 0; i < a.size(); ++i) m(static_cast<int>(i), 0) = a[i];
  return m;
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Mat::column_vec(int j) const {
  Vec v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Mat operator+(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) throw ContractError("Mat+: shape mismatch");
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

Mat operator-(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) throw ContractError("Mat-: shape mismatch");
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw ContractError("Mat*: shape mismatch");
  Mat r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Mat operator*(double s, const Mat& a) {
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

Vec matvec(const Mat& a, const Vec& x) {
  if (a.cols() != static_cast<int>(x.size())) throw ContractError("matvec: shape mismatch");
  Vec y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

double frobenius_norm(const Mat& a) {
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
  return m;
}

bool all_finite(const Mat& a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j))) return false;
  return true;
}

bool is_symmetric(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j)
      if (std::fabs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// General eigenvalues: Householder Hessenberg reduction + implicit
// double-shift QR (Francis iteration, eigenvalues only).
// ---------------------------------------------------------------------------

namespace {

void to_hessenberg(Mat& a) {
  const int n = a.rows();
  for (int k = 0; k < n - 2; ++k) {
    // Householder reflector annihilating a(k+2..n-1, k).
    double scale = 0.0;
    for (int i = k + 1; i < n; ++i) scale += std::fabs(a(i, k));
    if (scale == 0.0) continue;
    Vec v(n, 0.0);
    double sigma = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      sigma += v[i] * v[i];
    }
    double alpha = -sign_with(std::sqrt(sigma), v[k + 1]);
    double vnorm2 = sigma - alpha * v[k + 1];
    if (vnorm2 <= 0.0) continue;
    v[k + 1] -= alpha;
    const double beta = 1.0 / vnorm2;  // reflector is I - beta v v^T (* 1/...)
    // A <- H A, with H = I - beta v v^T acting on rows k+1..n-1.
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= beta;
      for (int i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A H on columns k+1..n-1.
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= beta;
      for (int j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    a(k + 1, k) = alpha * scale;
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Eigenvalues of a real upper-Hessenberg matrix; destroys its argument.
// Classic Francis double-shift sweep with deflation, in the spirit of the
// EISPACK hqr routine.
std::vector<std::complex<double>> hessenberg_qr(Mat& h) {
  const int n = h.rows();
  std::vector<std::complex<double>> eig(n);
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(h(i, j));
  if (anorm == 0.0) anorm = 1.0;

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l;
    for (;;) {
      // Find small subdiagonal element.
      for (l = nn; l >= 1; --l) {
        double s = std::fabs(h(l - 1, l - 1)) + std::fabs(h(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(h(l, l - 1)) <= kEps * s) {
          h(l, l - 1) = 0.0;
          break;
        }
      }
      double x = h(nn, nn);
      if (l == nn) {  // one real eigenvalue found
        eig[nn] = {x + t, 0.0};
        nn -= 1;
        break;
      }
      double y = h(nn - 1, nn - 1);
      double w = h(nn, nn - 1) * h(nn - 1, nn);
      if (l == nn - 1) {  // two eigenvalues from the trailing 2x2 block
        double p = 0.5 * (y - x);
        double q = p * p + w;
        double z = std::sqrt(std::fabs(q));
        x += t;
        if (q >= 0.0) {
          z = p + sign_with(z, p);
          eig[nn - 1] = {x + z, 0.0};
          eig[nn] = eig[nn - 1];
          if (z != 0.0) eig[nn] = {x - w / z, 0.0};
        } else {
          eig[nn - 1] = {x + p, z};
          eig[nn] = std::conj(eig[nn - 1]);
        }
        nn -= 2;
        break;
      }
      if (its == 60)
        throw NumericError("eigenvalues: QR iteration did not converge");
      double p = 0.0, q = 0.0, z = 0.0, r = 0.0, s = 0.0;
      if (its == 10 || its == 30) {
        // Exceptional shift.
        t += x;
        for (int i = 0; i <= nn; ++i) h(i, i) -= x;
        s = std::fabs(h(nn, nn - 1)) + std::fabs(h(nn - 1, nn - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      ++its;
      // Look for two consecutive small subdiagonal elements.
      int m;
      for (m = nn - 2; m >= l; --m) {
        z = h(m, m);
        r = x - z;
        s = y - z;
        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - z - r - s;
        r = h(m + 2, m + 1);
        s = std::fabs(p) + std::fabs(q) + std::fabs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        double u = std::fabs(h(m, m - 1)) * (std::fabs(q) + std::fabs(r));
        double v = std::fabs(p) * (std::fabs(h(m - 1, m - 1)) + std::fabs(z) + std::fabs(h(m + 1, m + 1)));
        if (u <= kEps * v) break;
      }
      for (int i = m + 2; i <= nn; ++i) {
        h(i, i - 2) = 0.0;
        if (i != m + 2) h(i, i - 3) = 0.0;
      }
      // Double QR sweep on rows/cols m..nn.
      for (int k = m; k <= nn - 1; ++k) {
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = (k != nn - 1) ? h(k + 2, k - 1) : 0.0;
          x = std::fabs(p) + std::fabs(q) + std::fabs(r);
          if (x != 0.0) {
            p /= x;
            q /= x;
            r /= x;
          }
        }
        s = sign_with(std::sqrt(p * p + q * q + r * r), p);
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) h(k, k - 1) = -h(k, k - 1);
        } else {
          h(k, k - 1) = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;
        // Row modification.
        for (int j = k; j <= nn; ++j) {
          p = h(k, j) + q * h(k + 1, j);
          if (k != nn - 1) {
            p += r * h(k + 2, j);
            h(k + 2, j) -= p * z;
          }
          h(k + 1, j) -= p * y;
          h(k, j) -= p * x;
        }
        int mmin = (nn < k + 3) ? nn : k + 3;
        // Column modification.
        for (int i = l; i <= mmin; ++i) {
          p = x * h(i, k) + y * h(i, k + 1);
          if (k != nn - 1) {
            p += z * h(i, k + 2);
            h(i, k + 2) -= p * r;
          }
          h(i, k + 1) -= p * q;
          h(i, k) -= p;
        }
      }
    }
  }
  return eig;
}

}  // namespace

Spectrum eigenvalues(const Mat& a, double tol_zero) {
  if (a.rows() != a.cols()) throw ContractError("eigenvalues: matrix must be square");
  if (a.rows() == 0) throw ContractError("eigenvalues: empty matrix");
  if (a.rows() > 16) throw ContractError("eigenvalues: dimension exceeds 16");
  if (!all_finite(a)) throw ContractError("eigenvalues: non-finite entries");

  Spectrum out;
  if (a.rows() == 1) {
    out.eigenvalues = {std::complex<double>(a(0, 0), 0.0)};
  } else {
    Mat h = a;
    to_hessenberg(h);
    out.eigenvalues = hessenberg_qr(h);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](const std::complex<double>& p, const std::complex<double>& q) {
                if (p.real() != q.real()) return p.real() < q.real();
                return p.imag() < q.imag();
              });
  }
  double radius = 0.0;
  for (const auto& ev : out.eigenvalues) radius = std::max(radius, std::abs(ev));
  out.tol_zero = tol_zero > 0.0 ? tol_zero : 1e-7 * (1.0 + radius);
  out.max_real_part_nonzero = -std::numeric_limits<double>::infinity();
  for (const auto& ev : out.eigenvalues) {
    if (std::abs(ev) < out.tol_zero) {
      ++out.zero_multiplicity;
    } else {
      out.has_nonzero = true;
      out.max_real_part_nonzero = std::max(out.max_real_part_nonzero, ev.real());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition: cyclic Jacobi.
// ---------------------------------------------------------------------------

void symmetric_eigen(const Mat& s, Vec& values, Mat& vectors) {
  if (s.rows() != s.cols()) throw ContractError("symmetric_eigen: matrix must be square");
  const int n = s.rows();
  Mat a = s;
  vectors = Mat::identity(n);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * (1.0 + frobenius_norm(s) * frobenius_norm(s))) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double sgn = theta >= 0.0 ? 1.0 : -1.0;
        const double tau = sgn / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tau * tau + 1.0);
        const double sn = tau * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = vectors(k, p), vkq = vectors(k, q);
          vectors(k, p) = c * vkp - sn * vkq;
          vectors(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  values.assign(n, 0.0);
  for (int i = 0; i < n; ++i) values[i] = a(i, i);
  // Sort ascending, permuting eigenvectors along.
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return values[i] < values[j]; });
  Vec sorted_vals(n);
  Mat sorted_vecs(n, n);
  for (int j = 0; j < n; ++j) {
    sorted_vals[j] = values[idx[j]];
    for (int i = 0; i < n; ++i) sorted_vecs(i, j) = vectors(i, idx[j]);
  }
  values = sorted_vals;
  vectors = sorted_vecs;
}

Vec singular_values(const Mat& a) {
  Mat g = a.transposed() * a;
  Vec vals;
  Mat vecs;
  symmetric_eigen(g, vals, vecs);
  Vec sv(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) sv[i] = std::sqrt(std::max(0.0, vals[vals.size() - 1 - i]));
  return sv;
}

int numerical_rank(const Mat& a, double tol) {
  int rank = 0;
  for (double sv : singular_values(a))
    if (sv > tol) ++rank;
  return rank;
}

double spectral_norm(const Mat& a) {
  Vec sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.front();
}

// ---------------------------------------------------------------------------
// Definiteness, Lyapunov residual, block transform, subspace intersection.
// ---------------------------------------------------------------------------

DefinitenessResult definiteness(const Mat& s, double tol) {
  if (s.rows() != s.cols()) throw ContractError("definiteness: matrix must be square");
  const double scale = 1.0 + max_abs(s);
  if (!is_symmetric(s, 1e-9 * scale))
    throw ContractError("definiteness: matrix not symmetric to 1e-9");
  Vec vals;
  Mat vecs;
  Mat sym(s.rows(), s.cols());
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 0; j < s.cols(); ++j) sym(i, j) = 0.5 * (s(i, j) + s(j, i));
  symmetric_eigen(sym, vals, vecs);
  DefinitenessResult r;
  r.min_eigenvalue = vals.front();
  r.max_eigenvalue = vals.back();
  const bool any_pos = vals.back() > tol;
  const bool any_neg = vals.front() < -tol;
  r.zero_matrix = !any_pos && !any_neg;
  if (r.zero_matrix) {
    r.tag = Definiteness::PSD;  // degenerate: PSD and NSD at once
  } else if (!any_neg) {
    r.tag = vals.front() > tol ? Definiteness::PD : Definiteness::PSD;
  } else if (!any_pos) {
    r.tag = vals.back() < -tol ? Definiteness::ND : Definiteness::NSD;
  } else {
    r.tag = Definiteness::Indefinite;
  }
  return r;
}

bool is_psd_like(const DefinitenessResult& d) {
  return d.zero_matrix || d.tag == Definiteness::PD || d.tag == Definiteness::PSD;
}

bool is_nsd_like(const DefinitenessResult& d) {
  return d.zero_matrix || d.tag == Definiteness::ND || d.tag == Definiteness::NSD;
}

double lyapunov_residual(const Mat& atil, const Mat& p) {
  if (atil.rows() != atil.cols() || !p.same_shape(atil))
    throw ContractError("lyapunov_residual: dimension mismatch");
  DefinitenessResult pd = definiteness(p, 1e-12 * (1.0 + max_abs(p)));
  if (pd.tag != Definiteness::PD)
    throw ContractError("lyapunov_residual: P is not positive definite");
  Mat m = atil.transposed() * p + p * atil;
  // Symmetrize to scrub roundoff before the symmetric solver.
  Mat sym(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) sym(i, j) = 0.5 * (m(i, j) + m(j, i));
  Vec vals;
  Mat vecs;
  symmetric_eigen(sym, vals, vecs);
  return vals.back();
}

BlockTransformResult block_transform(const Mat& q, const Mat& a, int p) {
  if (q.rows() != q.cols() || !a.same_shape(q))
    throw ContractError("block_transform: dimension mismatch");
  if (p < 0 || p >= q.rows()) throw ContractError("block_transform: invalid block size");
  const int n = q.rows();
  Mat gram = q.transposed() * q;
  const double scale = 1.0 + max_abs(gram);
  for (int i = 0; i < n; ++i) {
    if (gram(i, i) <= 0.0) throw ContractError("block_transform: zero column in Q");
    for (int j = 0; j < n; ++j)
      if (i != j && std::fabs(gram(i, j)) > 1e-8 * scale)
        throw ContractError("block_transform: Q columns not orthogonal");
  }
  BlockTransformResult r;
  r.printed = q.transposed() * a * q;
  Mat qhat = q;
  for (int j = 0; j < n; ++j) {
    const double nrm = std::sqrt(gram(j, j));
    for (int i = 0; i < n; ++i) qhat(i, j) /= nrm;
  }
  r.normalized = qhat.transposed() * a * qhat;
  r.zero_block_ok = true;
  for (const Mat* m : {&r.printed, &r.normalized}) {
    for (int i = 0; i < p && r.zero_block_ok; ++i)
      for (int j = 0; j < n; ++j)
        if (std::fabs((*m)(i, j)) > 1e-8 || std::fabs((*m)(j, i)) > 1e-8) {
          r.zero_block_ok = false;
          break;
        }
  }
  r.trailing_block = Mat(n - p, n - p);
  for (int i = 0; i < n - p; ++i)
    for (int j = 0; j < n - p; ++j) r.trailing_block(i, j) = r.normalized(i + p, j + p);
  return r;
}

std::vector<Vec> range_null_intersection(const Mat& b, const Mat& a, double tol) {
  if (a.rows() != a.cols()) throw ContractError("range_null_intersection: A must be square");
  if (b.rows() != a.rows()) throw ContractError("range_null_intersection: row mismatch");
  if (!all_finite(a) || !all_finite(b))
    throw ContractError("range_null_intersection: non-finite entries");
  const int n = a.rows();

  // Orthonormal basis of range(B) by modified Gram-Schmidt with a
  // scale-aware drop tolerance.
  std::vector<Vec> basis;
  double bscale = std::max(1.0, max_abs(b));
  for (int j = 0; j < b.cols(); ++j) {
    Vec v = b.column_vec(j);
    for (const Vec& u : basis) {
      double c = dot(u, v);
      for (int i = 0; i < n; ++i) v[i] -= c * u[i];
    }
    double nrm = norm2(v);
    if (nrm > 1e-12 * bscale) {
      for (int i = 0; i < n; ++i) v[i] /= nrm;
      basis.push_back(v);
    }
  }

  // x in range(B) iff (I - U U^T) x = 0. Stack that with A x = 0 and find the
  // null space of the Gram matrix of the stacked system.
  Mat proj = Mat::identity(n);
  for (const Vec& u : basis) proj = proj - Mat::outer(u, u);
  Mat stacked(2 * n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      stacked(i, j) = proj(i, j);
      stacked(n + i, j) = a(i, j);
    }
  Mat gram = stacked.transposed() * stacked;
  Vec vals;
  Mat vecs;
  symmetric_eigen(gram, vals, vecs);
  const double thresh = tol * (1.0 + spectral_norm(stacked));
  std::vector<Vec> result;
  for (int k = 0; k < n; ++k) {
    if (std::sqrt(std::max(0.0, vals[k])) <= thresh) {
      result.push_back(vecs.column_vec(k));
    }
  }
  return result;
}

}  // namespace saddlescope
