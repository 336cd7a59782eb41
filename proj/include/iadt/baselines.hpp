#ifndef IADT_BASELINES_HPP
#define IADT_BASELINES_HPP

// Classical domain-adaptation baselines, each ending in a logistic classifier
// trained on (adapted) source features:
//   tca    transfer components from the kernel MMD generalized eigenproblem
//   gfk    geodesic flow kernel between source and target PCA subspaces
//   sa     subspace alignment M = PsᵀPt
//   coral  source whitening and target recoloring

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iadt/data.hpp"
#include "iadt/errors.hpp"
#include "iadt/losses.hpp"
#include "iadt/numerics.hpp"
#include "iadt/training.hpp"

namespace iadt {

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticModel {
  Vector weights;
  double bias = 0.0;
};

struct LogisticOptions {
  double l2 = 1e-4;
  std::size_t iters = 500;
  double lr = 0.1;
};

namespace detail {

inline void check_binary(std::span<const int> y, const char* what) {
  for (int v : y)
    if (v != 0 && v != 1) throw ParameterError(std::string(what) + ": labels must be 0 or 1");
}

// Mean-CE + (l2/2)‖w‖² gradient; returns its ∞-norm.
inline double logistic_gradient(const LogisticModel& m, const Matrix& x, std::span<const int> y,
                                double l2, Vector& gw, double& gb) {
  const std::size_t n = x.rows();
  gw.assign(x.cols(), 0.0);
  gb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    const double r = sigmoid(dot(m.weights, xi) + m.bias) - static_cast<double>(y[i]);
    for (std::size_t j = 0; j < x.cols(); ++j) gw[j] += r * xi[j];
    gb += r;
  }
  const double inv = 1.0 / static_cast<double>(n);
  double inf = std::abs(gb * inv);
  gb *= inv;
  for (std::size_t j = 0; j < gw.size(); ++j) {
    gw[j] = gw[j] * inv + l2 * m.weights[j];
    inf = std::max(inf, std::abs(gw[j]));
  }
  return inf;
}

}  // namespace detail

/// Full-batch gradient descent on L2-regularized mean cross-entropy; stops
/// after `iters` steps or once the gradient ∞-norm is ≤ 1e-8. The bias is
/// not regularized.
inline LogisticModel logistic_fit(const Matrix& x, std::span<const int> y,
                                  const LogisticOptions& opt = {}) {
  if (x.rows() != y.size()) throw DimensionError("logistic_fit: label count != rows");
  detail::check_binary(y, "logistic_fit");
  const auto pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(y.size())) {
    throw ParameterError("logistic_fit: need at least one sample of each class");
  }
  LogisticModel m{Vector(x.cols(), 0.0), 0.0};
  Vector gw;
  double gb = 0.0;
  for (std::size_t it = 0; it < opt.iters; ++it) {
    if (detail::logistic_gradient(m, x, y, opt.l2, gw, gb) <= 1e-8) break;
    for (std::size_t j = 0; j < gw.size(); ++j) m.weights[j] -= opt.lr * gw[j];
    m.bias -= opt.lr * gb;
  }
  return m;
}

inline double logistic_gradient_norm(const LogisticModel& m, const Matrix& x,
                                     std::span<const int> y, double l2) {
  Vector gw;
  double gb = 0.0;
  return detail::logistic_gradient(m, x, y, l2, gw, gb);
}

inline Prediction logistic_predict(const LogisticModel& m, const Matrix& x,
                                   double threshold = 0.5) {
  if (x.cols() != m.weights.size()) {
    throw DimensionError("logistic_predict: " + std::to_string(x.cols()) + " features vs " +
                         std::to_string(m.weights.size()) + " weights");
  }
  Prediction p;
  p.probs.resize(x.rows());
  p.labels.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    p.probs[i] = detail::sigmoid(dot(m.weights, x.row(i)) + m.bias);
    p.labels[i] = p.probs[i] >= threshold;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Subspace maps

enum class AdaptMethod { identity, tca, gfk, sa, coral };

inline std::string_view to_string(AdaptMethod m) {
  switch (m) {
    case AdaptMethod::identity: return "identity";
    case AdaptMethod::tca: return "tca";
    case AdaptMethod::gfk: return "gfk";
    case AdaptMethod::sa: return "sa";
    case AdaptMethod::coral: return "coral";
  }
  return "identity";
}

struct SubspaceMap {
  AdaptMethod method = AdaptMethod::identity;
  std::size_t input_dim = 0;

  // tca: adapted(x) = k(x, reference)·projection
  Matrix reference;
  KernelSpec kernel;
  Matrix projection;
  Vector eigenvalues;

  // gfk and sa: each domain is z-scored with its own statistics first
  FeatureStats source_norm;
  FeatureStats target_norm;

  // gfk: G and G^{1/2}; adapted(x) = x·G^{1/2}
  Matrix g;
  Matrix g_sqrt;
  Vector principal_angles;

  // sa: source → x·Ps·M, target → x·Pt
  Matrix ps;
  Matrix pt;
  Matrix m;

  // coral: source → (x − μs)·Cs^{-1/2}·Ct^{1/2} + μt, target unchanged
  Vector source_mean;
  Vector target_mean;
  Matrix recolor;
};

inline SubspaceMap identity_map(std::size_t d) {
  SubspaceMap s;
  s.input_dim = d;
  return s;
}

namespace detail {

inline void check_pair(const Matrix& xs, const Matrix& xt, const char* what) {
  if (xs.cols() != xt.cols()) throw DimensionError(std::string(what) + ": feature counts differ");
  if (xs.rows() == 0 || xt.rows() == 0) throw ParameterError(std::string(what) + ": empty domain");
}

/// Column means and (n−1) standard deviations floored at kSdFloor.
inline FeatureStats column_stats(const Matrix& x) {
  FeatureStats st{column_means(x), Vector(x.cols(), 0.0)};
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = x(r, c) - st.means[c];
      st.sds[c] += d * d;
    }
  const double denom = x.rows() > 1 ? double(x.rows() - 1) : 1.0;
  for (double& v : st.sds) v = std::max(std::sqrt(v / denom), kSdFloor);
  return st;
}

inline Matrix stack_rows(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) std::copy(a.row(r).begin(), a.row(r).end(), out.row(r).begin());
  for (std::size_t r = 0; r < b.rows(); ++r)
    std::copy(b.row(r).begin(), b.row(r).end(), out.row(a.rows() + r).begin());
  return out;
}

}  // namespace detail

/// TCA. Solves the generalized problem (KHK)·w = λ·(KLK + μI)·w for the top
/// `dim` eigenvectors. L = eeᵀ with e = (1/ns, ..., −1/nt, ...) is rank one, so
/// B = KLK + μI has the closed-form inverse root used to symmetrize the problem.
/// The map can have fewer than `dim` components when KHK is rank deficient
/// (a linear kernel has rank at most the feature count).
inline SubspaceMap tca_fit(const Matrix& xs, const Matrix& xt, std::size_t dim = 40,
                           double mu = 0.01, const KernelSpec& kernel = KernelSpec::linear()) {
  detail::check_pair(xs, xt, "tca_fit");
  const std::size_t ns = xs.rows(), nt = xt.rows(), n = ns + nt;
  if (dim == 0 || dim > n) {
    throw ParameterError("tca_fit: dim " + std::to_string(dim) + " must lie in [1, ns+nt=" +
                         std::to_string(n) + "]");
  }
  if (!(mu > 0.0)) throw ParameterError("tca_fit: mu must be > 0");
  SubspaceMap map;
  map.method = AdaptMethod::tca;
  map.input_dim = xs.cols();
  map.kernel = kernel;
  map.reference = detail::stack_rows(xs, xt);
  const Matrix k = kernel_matrix(map.reference, map.reference, kernel);

  Vector e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = i < ns ? 1.0 / double(ns) : -1.0 / double(nt);
  Vector u(n, 0.0), krow(n, 0.0);  // u = K·e, krow = K·1
  for (std::size_t i = 0; i < n; ++i) {
    auto ki = k.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      u[i] += ki[j] * e[j];
      krow[i] += ki[j];
    }
  }
  // KHK = K·K − (K1)(K1)ᵀ/n
  Matrix a = matmul(k, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) -= krow[i] * krow[j] / double(n);

  // (μI + uuᵀ)^{-1/2} = μ^{-1/2}(I − qqᵀ) + (μ + ‖u‖²)^{-1/2} qqᵀ
  const double unorm2 = dot(u, u);
  Matrix b_inv_sqrt = Matrix::identity(n) * (1.0 / std::sqrt(mu));
  if (unorm2 > 0.0) {
    const double coef = (1.0 / std::sqrt(mu + unorm2) - 1.0 / std::sqrt(mu)) / unorm2;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b_inv_sqrt(i, j) += coef * u[i] * u[j];
  }
  const Matrix c = matmul(matmul(b_inv_sqrt, a), b_inv_sqrt);
  EigResult eg = eig_sym(c);
  // Components past the numerical rank of KHK map every input to ~0; keep
  // only those with eigenvalue above 1e-9 of the largest.
  std::size_t keep = 0;
  while (keep < dim && eg.values[keep] > 1e-9 * std::max(eg.values[0], 0.0)) ++keep;
  if (keep == 0) throw SingularityError("tca_fit: kernel has no transfer components");
  map.projection = matmul(b_inv_sqrt, eg.vectors.col_block(0, keep));
  map.eigenvalues.assign(eg.values.begin(), eg.values.begin() + static_cast<std::ptrdiff_t>(keep));
  return map;
}

/// Geodesic flow kernel G = ∫₀¹ Φ(t)Φ(t)ᵀ dt along the Grassmann geodesic
/// from the source PCA subspace to the target one, in closed form from the
/// principal angles. PCA runs on each domain z-scored with its own statistics.
inline SubspaceMap gfk_fit(const Matrix& xs, const Matrix& xt, std::size_t dim = 20) {
  detail::check_pair(xs, xt, "gfk_fit");
  const std::size_t dfeat = xs.cols();
  if (dim == 0 || 2 * dim > dfeat) {
    throw ParameterError("gfk_fit: dim " + std::to_string(dim) + " must be <= features/2 = " +
                         std::to_string(dfeat / 2));
  }
  SubspaceMap map;
  map.method = AdaptMethod::gfk;
  map.input_dim = dfeat;
  map.source_norm = detail::column_stats(xs);
  map.target_norm = detail::column_stats(xt);
  const Matrix ps = pca(standardize(xs, map.source_norm), dim);
  const Matrix pt = pca(standardize(xt, map.target_norm), dim);

  // Orthogonal complement of span(Ps): eigenvalue-1 eigenvectors of I − PsPsᵀ.
  Matrix proj = Matrix::identity(dfeat) - matmul_nt(ps, ps);
  const Matrix rs = eig_sym(proj).vectors.col_block(0, dfeat - dim);

  const SvdResult sv = svd(matmul_tn(ps, pt));  // PsᵀPt = U1·Γ·Vᵀ
  const Matrix& u1 = sv.u;
  const Matrix bmat = matmul(matmul_tn(rs, pt), sv.v);  // RsᵀPt·V = −U2·Σ
  Matrix u2(dfeat - dim, dim);
  Vector theta(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double sigma = 0.0;
    for (std::size_t r = 0; r < bmat.rows(); ++r) sigma += bmat(r, i) * bmat(r, i);
    sigma = std::sqrt(sigma);
    theta[i] = std::atan2(sigma, std::clamp(sv.s[i], 0.0, 1.0));
    if (sigma > 1e-12) {
      for (std::size_t r = 0; r < bmat.rows(); ++r) u2(r, i) = -bmat(r, i) / sigma;
    }
  }

  // Per-angle integrals of cos², cos·sin and sin² (with the −sin sign folded in).
  Vector l1(dim), l2(dim), l3(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double t = theta[i];
    if (t < 1e-6) {
      l1[i] = 1.0 - t * t / 3.0;
      l2[i] = -t / 2.0;
      l3[i] = t * t / 3.0;
    } else {
      const double sinc = std::sin(2.0 * t) / (2.0 * t);
      l1[i] = 0.5 * (1.0 + sinc);
      l2[i] = 0.5 * (std::cos(2.0 * t) - 1.0) / (2.0 * t);
      l3[i] = 0.5 * (1.0 - sinc);
    }
  }
  const Matrix a = matmul(ps, u1);  // D x dim
  const Matrix b = matmul(rs, u2);  // D x dim
  Matrix g(dfeat, dfeat);
  for (std::size_t p = 0; p < dfeat; ++p)
    for (std::size_t q = p; q < dfeat; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        s += l1[i] * a(p, i) * a(q, i) + l2[i] * (a(p, i) * b(q, i) + b(p, i) * a(q, i)) +
             l3[i] * b(p, i) * b(q, i);
      }
      g(p, q) = s;
      g(q, p) = s;
    }
  map.g = std::move(g);
  map.g_sqrt = sqrt_psd(map.g, 0.0);
  map.principal_angles = std::move(theta);
  map.ps = ps;
  map.pt = pt;
  return map;
}

/// Subspace alignment: M = PsᵀPt between per-domain z-scored PCA bases.
inline SubspaceMap sa_fit(const Matrix& xs, const Matrix& xt, std::size_t dim = 20) {
  detail::check_pair(xs, xt, "sa_fit");
  SubspaceMap map;
  map.method = AdaptMethod::sa;
  map.input_dim = xs.cols();
  map.source_norm = detail::column_stats(xs);
  map.target_norm = detail::column_stats(xt);
  map.ps = pca(standardize(xs, map.source_norm), dim);
  map.pt = pca(standardize(xt, map.target_norm), dim);
  map.m = matmul_tn(map.ps, map.pt);
  return map;
}

inline SubspaceMap coral_fit(const Matrix& xs, const Matrix& xt, double reg = 1.0) {
  detail::check_pair(xs, xt, "coral_fit");
  if (xs.rows() < 2 || xt.rows() < 2) throw ParameterError("coral_fit: need >= 2 samples per domain");
  if (!(reg >= 0.0)) throw ParameterError("coral_fit: reg must be >= 0");
  SubspaceMap map;
  map.method = AdaptMethod::coral;
  map.input_dim = xs.cols();
  const Matrix id = Matrix::identity(xs.cols());
  const Matrix cs = covariance(xs) + id * reg;
  const Matrix ct = covariance(xt) + id * reg;
  map.recolor = matmul(inv_sqrt_psd(cs), sqrt_psd(ct));
  map.source_mean = column_means(xs);
  map.target_mean = column_means(xt);
  return map;
}

namespace detail {

inline void check_input(const SubspaceMap& map, const Matrix& x, const char* what) {
  if (x.cols() != map.input_dim) {
    throw DimensionError(std::string(what) + ": " + std::to_string(x.cols()) +
                         " features, map expects " + std::to_string(map.input_dim));
  }
}

inline Matrix tca_transform(const SubspaceMap& map, const Matrix& x) {
  return matmul(kernel_matrix(x, map.reference, map.kernel), map.projection);
}

}  // namespace detail

inline Matrix adapt_source(const SubspaceMap& map, const Matrix& xs) {
  detail::check_input(map, xs, "adapt_source");
  switch (map.method) {
    case AdaptMethod::identity: return xs;
    case AdaptMethod::tca: return detail::tca_transform(map, xs);
    case AdaptMethod::gfk: return matmul(standardize(xs, map.source_norm), map.g_sqrt);
    case AdaptMethod::sa: return matmul(matmul(standardize(xs, map.source_norm), map.ps), map.m);
    case AdaptMethod::coral: {
      Matrix out = matmul(center_columns(xs, map.source_mean), map.recolor);
      for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += map.target_mean[c];
      return out;
    }
  }
  return xs;
}

inline Matrix adapt_target(const SubspaceMap& map, const Matrix& xt) {
  detail::check_input(map, xt, "adapt_target");
  switch (map.method) {
    case AdaptMethod::identity: return xt;
    case AdaptMethod::tca: return detail::tca_transform(map, xt);
    case AdaptMethod::gfk: return matmul(standardize(xt, map.target_norm), map.g_sqrt);
    case AdaptMethod::sa: return matmul(standardize(xt, map.target_norm), map.pt);
    case AdaptMethod::coral: return xt;
  }
  return xt;
}

/// Adapts both domains, z-scores them with adapted-source statistics, fits
/// logistic regression on the source side and predicts the target side.
inline Prediction baseline_predict(const SubspaceMap& map, const Matrix& xs,
                                   std::span<const int> ys, const Matrix& xt,
                                   double threshold = 0.5, const LogisticOptions& opt = {}) {
  const Matrix as = adapt_source(map, xs);
  const Matrix at = adapt_target(map, xt);
  if (as.rows() < 2) throw ParameterError("baseline_predict: need >= 2 source samples");
  const FeatureStats st = detail::column_stats(as);
  const LogisticModel lm = logistic_fit(standardize(as, st), ys, opt);
  return logistic_predict(lm, standardize(at, st), threshold);
}

}  // namespace iadt

#endif  // IADT_BASELINES_HPP
