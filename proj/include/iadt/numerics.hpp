#ifndef IADT_NUMERICS_HPP
#define IADT_NUMERICS_HPP

// Dense row-major linear algebra: products, cyclic Jacobi eigendecomposition,
// eig-based SVD, PSD matrix roots, PCA bases and pivoted solves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iadt/errors.hpp"

namespace iadt {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (!std::isfinite(fill)) throw ParameterError("Matrix: non-finite fill value");
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                           " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw ParameterError("Matrix: non-finite entry");
    }
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
      for (double v : r) {
        if (!std::isfinite(v)) throw ParameterError("Matrix: non-finite entry");
        data_.push_back(v);
      }
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  Vector col(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  /// Rows [begin, end) as a new matrix.
  Matrix row_block(std::size_t begin, std::size_t end) const {
    Matrix out(end - begin, cols_);
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
              data_.begin() + static_cast<std::ptrdiff_t>(end * cols_), out.data_.begin());
    return out;
  }

  /// Columns [begin, end) as a new matrix.
  Matrix col_block(std::size_t begin, std::size_t end) const {
    Matrix out(rows_, end - begin);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = (*this)(r, c);
    return out;
  }

  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto src = row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same(const Matrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError(std::string(what) + ": shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigResult {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values[i]
};

struct SvdResult {
  Matrix u;  // rows x k
  Vector s;  // k = min(rows, cols), descending, >= 0
  Matrix v;  // cols x k
};

inline constexpr double kDefaultRootEps = 1e-10;

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

/// aᵀ·b without materializing the transpose.
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("matmul_tn: row counts differ");
  Matrix c(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* bk = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      double* ci = c.row(i).data();
      for (std::size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

/// a·bᵀ without materializing the transpose.
inline Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("matmul_nt: column counts differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto bj = b.row(j);
      c(i, j) = std::inner_product(ai.begin(), ai.end(), bj.begin(), 0.0);
    }
  }
  return c;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vector column_means(const Matrix& x) {
  Vector mu(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) mu[c] += row[c];
  }
  if (x.rows() > 0) {
    for (double& m : mu) m /= static_cast<double>(x.rows());
  }
  return mu;
}

inline Matrix center_columns(const Matrix& x, std::span<const double> mu) {
  if (mu.size() != x.cols()) throw DimensionError("center_columns: mean length mismatch");
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) row[c] -= mu[c];
  }
  return out;
}

/// Sample covariance (denominator n-1).
inline Matrix covariance(const Matrix& x) {
  if (x.rows() < 2) throw ParameterError("covariance: need at least 2 rows");
  Matrix xc = center_columns(x, column_means(x));
  Matrix c = matmul_tn(xc, xc);
  c *= 1.0 / static_cast<double>(x.rows() - 1);
  return c;
}

inline Matrix symmetrize(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("symmetrize: matrix is not square");
  Matrix s = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = m;
      s(j, i) = m;
    }
  return s;
}

namespace detail {

// Flip each column so its largest-magnitude entry (first on ties) is positive.
inline void fix_column_signs(Matrix& v) {
  for (std::size_t c = 0; c < v.cols(); ++c) {
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t r = 0; r < v.rows(); ++r) {
      const double a = std::abs(v(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (v.rows() > 0 && v(best, c) < 0.0) {
      for (std::size_t r = 0; r < v.rows(); ++r) v(r, c) = -v(r, c);
    }
  }
}

}  // namespace detail

/// Symmetric eigendecomposition by cyclic Jacobi rotations. The input is
/// symmetrized first. Stops when the off-diagonal Frobenius norm drops to
/// 1e-12·‖a‖_F or after 100 sweeps.
inline EigResult eig_sym(const Matrix& input) {
  if (input.rows() != input.cols()) throw DimensionError("eig_sym: matrix is not square");
  const std::size_t n = input.rows();
  Matrix a = symmetrize(input);
  // Eigenvectors are accumulated as rows so rotations touch contiguous memory.
  Matrix vt = Matrix::identity(n);

  const double norm = a.frobenius();
  const double target = 1e-12 * norm;
  // Skipping entries below this bound cannot leave the off-norm above target.
  const double skip = n > 1 ? target / (2.0 * static_cast<double>(n)) : 0.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && norm > 0.0; ++sweep) {
    if (off_norm() <= target) break;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip) continue;
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = a(p, p);
        const double aqq = a(q, q);
        double* rp = a.row(p).data();
        double* rq = a.row(q).data();
        for (std::size_t k = 0; k < n; ++k) {
          const double x = rp[k];
          const double y = rq[k];
          rp[k] = c * x - s * y;
          rq[k] = s * x + c * y;
        }
        for (std::size_t k = 0; k < n; ++k) {
          a(k, p) = rp[k];
          a(k, q) = rq[k];
        }
        // The row pass is only valid off the 2x2 block; set it in closed form.
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        double* vp = vt.row(p).data();
        double* vq = vt.row(q).data();
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  EigResult out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    auto src = vt.row(order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = src[r];
  }
  detail::fix_column_signs(out.vectors);
  return out;
}

namespace detail {

// Extend orthonormal columns [0, filled) of q to a full orthonormal set by
// Gram-Schmidt over the standard basis.
inline void complete_orthonormal(Matrix& q, std::size_t filled) {
  const std::size_t n = q.rows();
  std::size_t next = filled;
  for (std::size_t e = 0; e < n && next < q.cols(); ++e) {
    Vector cand(n, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t c = 0; c < next; ++c) {
        double proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) proj += q(r, c) * cand[r];
        for (std::size_t r = 0; r < n; ++r) cand[r] -= proj * q(r, c);
      }
    }
    const double nrm = norm2(cand);
    if (nrm < 1e-6) continue;
    for (std::size_t r = 0; r < n; ++r) q(r, next) = cand[r] / nrm;
    ++next;
  }
}

}  // namespace detail

/// Thin SVD through the eigendecomposition of the Gram matrix on the short side.
inline SvdResult svd(const Matrix& a) {
  if (a.rows() < a.cols()) {
    SvdResult t = svd(a.transpose());
    return {std::move(t.v), std::move(t.s), std::move(t.u)};
  }
  const std::size_t k = a.cols();
  EigResult e = eig_sym(matmul_tn(a, a));
  SvdResult out{Matrix(a.rows(), k), Vector(k), std::move(e.vectors)};
  const double smax = e.values.empty() ? 0.0 : std::sqrt(std::max(e.values[0], 0.0));
  const double tol = std::max(1e-13 * smax, 1e-300);
  std::size_t filled = 0;
  Matrix av = matmul(a, out.v);
  for (std::size_t i = 0; i < k; ++i) {
    const double s = std::sqrt(std::max(e.values[i], 0.0));
    out.s[i] = s;
    if (s > tol && filled == i) {
      for (std::size_t r = 0; r < a.rows(); ++r) out.u(r, i) = av(r, i) / s;
      ++filled;
    }
  }
  // Re-orthonormalize the computed columns; squaring the condition number in
  // aᵀa loses orthogonality on small singular values.
  for (std::size_t c = 0; c < filled; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double proj = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) proj += out.u(r, p) * out.u(r, c);
      for (std::size_t r = 0; r < a.rows(); ++r) out.u(r, c) -= proj * out.u(r, p);
    }
    double nrm = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) nrm += out.u(r, c) * out.u(r, c);
    nrm = std::sqrt(nrm);
    for (std::size_t r = 0; r < a.rows(); ++r) out.u(r, c) /= nrm;
  }
  detail::complete_orthonormal(out.u, filled);
  return out;
}

namespace detail {

inline Matrix psd_power(const Matrix& a, double eps, double exponent, const char* what) {
  if (a.rows() != a.cols()) throw DimensionError(std::string(what) + ": matrix is not square");
  EigResult e = eig_sym(a);
  const std::size_t n = a.rows();
  Vector f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::pow(std::max(e.values[i], eps), exponent);
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += e.vectors(i, k) * f[k] * e.vectors(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

}  // namespace detail

/// V·diag(max(λ, eps))^{-1/2}·Vᵀ.
inline Matrix inv_sqrt_psd(const Matrix& a, double eps = kDefaultRootEps) {
  return detail::psd_power(a, eps, -0.5, "inv_sqrt_psd");
}

/// V·diag(max(λ, eps))^{1/2}·Vᵀ.
inline Matrix sqrt_psd(const Matrix& a, double eps = kDefaultRootEps) {
  return detail::psd_power(a, eps, 0.5, "sqrt_psd");
}

/// Top-`dim` principal directions (cols x dim, orthonormal) of the
/// column-centered data, ordered by decreasing variance.
inline Matrix pca(const Matrix& x, std::size_t dim) {
  if (x.rows() < 2) throw ParameterError("pca: need at least 2 rows");
  if (dim == 0 || dim > std::min(x.rows() - 1, x.cols())) {
    throw ParameterError("pca: dim " + std::to_string(dim) + " exceeds min(rows-1, cols) = " +
                         std::to_string(std::min(x.rows() - 1, x.cols())));
  }
  EigResult e = eig_sym(covariance(x));
  return e.vectors.col_block(0, dim);
}

/// Gaussian elimination with partial pivoting; a·x = b for every column of b.
inline Matrix solve(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw DimensionError("solve: matrix is not square");
  if (b.rows() != a.rows()) throw DimensionError("solve: right-hand side row count mismatch");
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  Matrix lu = a;
  Matrix x = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(lu(r, k)) > std::abs(lu(piv, k))) piv = r;
    if (std::abs(lu(piv, k)) < 1e-12) {
      throw SingularityError("solve: pivot below 1e-12 at column " + std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(k, c), lu(piv, c));
      for (std::size_t c = 0; c < m; ++c) std::swap(x(k, c), x(piv, c));
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = lu(r, k) / lu(k, k);
      if (f == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) lu(r, c) -= f * lu(k, c);
      for (std::size_t c = 0; c < m; ++c) x(r, c) -= f * x(k, c);
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      double s = x(k, c);
      for (std::size_t j = k + 1; j < n; ++j) s -= lu(k, j) * x(j, c);
      x(k, c) = s / lu(k, k);
    }
  }
  return x;
}

/// Lower-triangular L with a = L·Lᵀ for symmetric positive definite a.
inline Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 1e-12) {
      throw SingularityError("cholesky: matrix not positive definite at column " +
                             std::to_string(j));
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// Solves L·x = b for lower-triangular L.
inline Matrix solve_lower(const Matrix& l, const Matrix& b) {
  if (l.rows() != l.cols() || b.rows() != l.rows()) throw DimensionError("solve_lower: shape");
  Matrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c)
    for (std::size_t i = 0; i < l.rows(); ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  return x;
}

/// Solves Lᵀ·x = b for lower-triangular L.
inline Matrix solve_lower_transposed(const Matrix& l, const Matrix& b) {
  if (l.rows() != l.cols() || b.rows() != l.rows()) {
    throw DimensionError("solve_lower_transposed: shape");
  }
  Matrix x = b;
  const std::size_t n = l.rows();
  for (std::size_t c = 0; c < b.cols(); ++c)
    for (std::size_t i = n; i-- > 0;) {
      double s = x(i, c);
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  return x;
}

}  // namespace iadt

#endif  // IADT_NUMERICS_HPP
