#ifndef IADT_TESTS_TEST_SUPPORT_HPP
#define IADT_TESTS_TEST_SUPPORT_HPP

// Shared generators and oracles for the unit and acceptance suites. Nothing
// here calls the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "iadt/iadt.hpp"

namespace iadt::testing {

inline Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sd);
  Matrix m(r, c);
  for (double& v : m.data()) v = n(rng);
  return m;
}

inline Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  Matrix a = random_matrix(n, n, seed);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

inline Matrix random_spd(std::size_t n, std::uint64_t seed) {
  Matrix a = random_matrix(n, n, seed);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * a(j, k);
      s(i, j) = acc + (i == j ? 0.5 : 0.0);
    }
  return s;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

inline Eigen::MatrixXd eigen_cov(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  return c.transpose() * c / double(x.rows() - 1);
}

inline Eigen::MatrixXd zscore(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    c.col(j) /= std::sqrt(c.col(j).squaredNorm() / double(x.rows() - 1));
  }
  return c;
}

// Top-k eigenvectors of a symmetric matrix, from Eigen.
inline Eigen::MatrixXd top_eigvecs(const Eigen::MatrixXd& s, Eigen::Index k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  return es.eigenvectors().rightCols(k).rowwise().reverse();
}

inline Matrix correlated(std::size_t n, std::size_t d, std::uint64_t seed, double spread) {
  Matrix x = random_matrix(n, d, seed);
  const Matrix mix = random_matrix(d, d, seed + 1, spread);
  Matrix out = matmul(x, mix + Matrix::identity(d));
  for (std::size_t r = 0; r < n; ++r) out(r, 0) += 2.0;
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

/// Largest principal angle between the column spans of a and b.
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qa(to_eigen(a)), qb(to_eigen(b));
  const Eigen::MatrixXd ua = qa.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd ub = qb.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  // sin of the largest angle is ‖(I − UaUaᵀ)Ub‖₂; asin keeps small angles accurate.
  const Eigen::MatrixXd resid = ub - ua * (ua.transpose() * ub);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  return std::asin(std::clamp(svd.singularValues()(0), 0.0, 1.0));
}

/// Joint objective evaluated from forward passes and the loss functions only.
inline double objective(const ModelParams& p, const Matrix& xs, const Matrix& xt,
                        const std::vector<int>& y, const LossWeights& w,
                        const KernelSpec& k = KernelSpec::linear()) {
  const Matrix zs = encode(p, attention_forward(p, xs).xw);
  double loss = w.cls * cross_entropy(y, classify(p, zs));
  if (xt.rows() > 0) {
    const Matrix zt = encode(p, attention_forward(p, xt).xw);
    loss += w.mmd * mmd_sq(zs, zt, k) + w.recon * l1_recon(xt, decode(p, zt));
  }
  return loss;
}

struct GradCheck {
  double max_rel = 0.0;
  std::size_t checked = 0;
  std::string worst;
};

/// Central differences over every parameter; relative error uses
/// max(|analytic|, |numeric|, floor) as the denominator. With an objective of
/// order 1 and step 1e-5 the difference quotient carries roundoff near 1e-10,
/// so the default floor of 1e-5 keeps exactly-zero gradients (for example L1
/// signs cancelling in a bias) from reading as relative error 1.
inline GradCheck finite_difference_check(const ModelParams& p, const Matrix& xs, const Matrix& xt,
                                         const std::vector<int>& y, const LossWeights& w,
                                         const KernelSpec& k = KernelSpec::linear(),
                                         double step = 1e-5, double floor = 1e-5) {
  const ForwardCache cache = xt.rows() > 0 ? forward(p, xs, xt) : forward_supervised(p, xs);
  const Gradients g = backward(p, cache, y, w, k).grads;
  GradCheck out;
  for (std::size_t li = 0; li < kParamLayers.size(); ++li) {
    const LayerGrad& gl = g.*kGradLayers[li];
    auto probe = [&](auto&& param_of, double analytic, const std::string& label) {
      ModelParams plus = p, minus = p;
      param_of(plus) += step;
      param_of(minus) -= step;
      const double numeric = (objective(plus, xs, xt, y, w, k) - objective(minus, xs, xt, y, w, k)) /
                             (2.0 * step);
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), floor});
      ++out.checked;
      if (rel > out.max_rel) {
        out.max_rel = rel;
        out.worst = label + " analytic=" + std::to_string(analytic) +
                    " numeric=" + std::to_string(numeric);
      }
    };
    const DenseLayer& l = p.*kParamLayers[li];
    for (std::size_t r = 0; r < l.out(); ++r) {
      for (std::size_t c = 0; c < l.in(); ++c) {
        probe([&](ModelParams& q) -> double& { return (q.*kParamLayers[li]).weights(r, c); },
              gl.weights(r, c), std::string(kLayerNames[li]) + ".W");
      }
      probe([&](ModelParams& q) -> double& { return (q.*kParamLayers[li]).biases[r]; },
            gl.biases[r], std::string(kLayerNames[li]) + ".b");
    }
  }
  return out;
}

/// Small random network with non-zero biases so every path is exercised.
inline ModelParams random_small_net(std::size_t d, std::size_t h, std::size_t m,
                                    std::uint64_t seed) {
  ModelParams p = init_params(d, h, m, seed);
  std::mt19937_64 rng(seed + 1000);
  std::normal_distribution<double> n(0.0, 0.3);
  for (auto layer : kParamLayers)
    for (double& b : (p.*layer).biases) b = n(rng);
  return p;
}

inline std::vector<int> alternating_labels(std::size_t n) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1 : 0;
  return y;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const char* base = std::getenv("IADT_TEST_TMP");
  std::filesystem::path p = base ? std::filesystem::path(base)
                                 : std::filesystem::temp_directory_path() / "iadt_tests";
  p /= name;
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Balanced accuracy from scratch.
inline double bac_of(const std::vector<int>& y, const std::vector<int>& yhat) {
  double tp = 0, tn = 0, p = 0, n = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1) {
      ++p;
      tp += yhat[i] == 1;
    } else {
      ++n;
      tn += yhat[i] == 0;
    }
  }
  return 0.5 * (tp / p + tn / n);
}

/// d = 2 model whose probability is sigmoid(x₀) on raw inputs: uniform
/// attention halves x, enc1 adds 10 so the relu stays linear, enc2 removes it,
/// and the classifier scales by 2.
inline TrainedModel sign_fixture_model() {
  TrainedModel m{init_params(2, 1, 1, 0), FeatureStats::identity(2)};
  ModelParams& p = m.params;
  for (double& w : p.attention.weights.data()) w = 0.0;
  p.attention.biases.assign(2, 0.0);
  p.enc1.weights(0, 0) = 1.0;
  p.enc1.weights(0, 1) = 0.0;
  p.enc1.biases[0] = 10.0;
  p.enc2.weights(0, 0) = 1.0;
  p.enc2.biases[0] = -10.0;
  p.clf.weights(0, 0) = 2.0;
  p.clf.biases[0] = 0.0;
  return m;
}

/// Target-domain rows that sign_fixture_model classifies into the given
/// confusion counts; |x₀| varies so scores are not all tied.
inline Dataset confusion_fixture(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
  Dataset ds{{"roi_1", "roi_2"}, {}, false};
  auto push = [&](std::size_t n, int label, double sign) {
    for (std::size_t i = 0; i < n; ++i) {
      Sample s;
      s.subject_id = "T" + std::to_string(ds.samples.size() + 1);
      s.domain = Domain::target;
      s.label = label;
      s.features = {sign * (0.5 + 0.1 * double(i)), 0.0};
      ds.samples.push_back(s);
    }
  };
  push(tp, 1, 1.0);
  push(tn, 0, -1.0);
  push(fp, 0, 1.0);
  push(fn, 1, -1.0);
  return ds;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace iadt::testing

#endif  // IADT_TESTS_TEST_SUPPORT_HPP
