#ifndef IADT_LOSSES_HPP
#define IADT_LOSSES_HPP

// Training losses: kernel MMD between latent batches, binary cross-entropy
// and the per-sample L1 reconstruction error, all batch-mean normalized.

#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "iadt/errors.hpp"
#include "iadt/numerics.hpp"

namespace iadt {

enum class KernelKind { linear, rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double gamma = 0.1;  // rbf: k(a, b) = exp(-gamma·‖a − b‖²)

  static KernelSpec linear() { return {KernelKind::linear, 0.1}; }
  static KernelSpec rbf(double gamma) {
    if (!(gamma > 0.0)) throw ParameterError("rbf kernel: gamma must be > 0");
    return {KernelKind::rbf, gamma};
  }

  double operator()(std::span<const double> a, std::span<const double> b) const {
    if (kind == KernelKind::linear) return dot(a, b);
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-gamma * d2);
  }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Gram matrix k(aᵢ, bⱼ).
inline Matrix kernel_matrix(const Matrix& a, const Matrix& b, const KernelSpec& k) {
  if (a.cols() != b.cols()) throw DimensionError("kernel_matrix: column counts differ");
  if (k.kind == KernelKind::linear) return matmul_nt(a, b);
  Matrix g(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) g(i, j) = k(a.row(i), b.row(j));
  return g;
}

namespace detail {

inline void check_mmd_inputs(const Matrix& zs, const Matrix& zt, const char* what) {
  if (zs.rows() == 0 || zt.rows() == 0) throw DimensionError(std::string(what) + ": empty batch");
  if (zs.cols() != zt.cols()) throw DimensionError(std::string(what) + ": column counts differ");
}

inline double mean_kernel(const Matrix& a, const Matrix& b, const KernelSpec& k) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) s += k(a.row(i), b.row(j));
  return s / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

}  // namespace detail

/// Biased (V-statistic) estimate of MMD². For the linear kernel this is
/// ‖mean(zs) − mean(zt)‖², computed directly.
inline double mmd_sq(const Matrix& zs, const Matrix& zt, const KernelSpec& k) {
  detail::check_mmd_inputs(zs, zt, "mmd_sq");
  if (k.kind == KernelKind::linear) {
    const Vector ms = column_means(zs);
    const Vector mt = column_means(zt);
    double s = 0.0;
    for (std::size_t j = 0; j < ms.size(); ++j) s += (ms[j] - mt[j]) * (ms[j] - mt[j]);
    return s;
  }
  return detail::mean_kernel(zs, zs, k) + detail::mean_kernel(zt, zt, k) -
         2.0 * detail::mean_kernel(zs, zt, k);
}

/// Gradients of mmd_sq with respect to every row of zs and zt.
inline std::pair<Matrix, Matrix> mmd_sq_grad(const Matrix& zs, const Matrix& zt,
                                             const KernelSpec& k) {
  detail::check_mmd_inputs(zs, zt, "mmd_sq_grad");
  const std::size_t ns = zs.rows();
  const std::size_t nt = zt.rows();
  const std::size_t m = zs.cols();
  const double fs = static_cast<double>(ns);
  const double ft = static_cast<double>(nt);
  Matrix gs(ns, m), gt(nt, m);
  if (k.kind == KernelKind::linear) {
    const Vector ms = column_means(zs);
    const Vector mt = column_means(zt);
    for (std::size_t j = 0; j < m; ++j) {
      const double diff = ms[j] - mt[j];
      for (std::size_t i = 0; i < ns; ++i) gs(i, j) = 2.0 / fs * diff;
      for (std::size_t i = 0; i < nt; ++i) gt(i, j) = -2.0 / ft * diff;
    }
    return {gs, gt};
  }
  // ∂k(a,b)/∂a = −2γ(a − b)·k(a,b); each within-domain pair appears twice.
  auto accumulate = [&](const Matrix& a, const Matrix& b, Matrix& ga, double coef) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      auto ai = a.row(i);
      auto gi = ga.row(i);
      for (std::size_t j = 0; j < b.rows(); ++j) {
        auto bj = b.row(j);
        const double kv = k(ai, bj);
        const double f = coef * (-2.0 * k.gamma) * kv;
        for (std::size_t c = 0; c < m; ++c) gi[c] += f * (ai[c] - bj[c]);
      }
    }
  };
  accumulate(zs, zs, gs, 2.0 / (fs * fs));
  accumulate(zs, zt, gs, -2.0 / (fs * ft));
  accumulate(zt, zt, gt, 2.0 / (ft * ft));
  accumulate(zt, zs, gt, -2.0 / (fs * ft));
  return {gs, gt};
}

/// Mean binary cross-entropy.
inline double cross_entropy(std::span<const int> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw DimensionError("cross_entropy: length mismatch");
  if (y.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += y[i] == 1 ? -std::log(yhat[i]) : -std::log(1.0 - yhat[i]);
  }
  return s / static_cast<double>(y.size());
}

/// Mean over rows of ‖xᵢ − x̂ᵢ‖₁.
inline double l1_recon(const Matrix& x, const Matrix& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) {
    throw DimensionError("l1_recon: shape mismatch");
  }
  if (x.rows() == 0) return 0.0;
  double s = 0.0;
  auto a = x.data();
  auto b = xhat.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(x.rows());
}

inline double total_loss(double mmd, double cls, double recon, double lambda1, double lambda2) {
  if (lambda1 < 0.0 || lambda2 < 0.0) throw ParameterError("total_loss: negative loss weight");
  return lambda1 * mmd + lambda2 * cls + recon;
}

}  // namespace iadt

#endif  // IADT_LOSSES_HPP
