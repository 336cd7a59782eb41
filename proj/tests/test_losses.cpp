#include <gtest/gtest.h>

#include "test_support.hpp"

namespace iadt {
namespace {

// Mean-embedding distance computed by hand, used as the linear-kernel oracle.
double mean_distance_sq(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) ma += a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i) mb += b(i, j);
    const double diff = ma / double(a.rows()) - mb / double(b.rows());
    s += diff * diff;
  }
  return s;
}

// Sum-of-kernels estimator, independent of the module's shortcut.
double mmd_by_sums(const Matrix& a, const Matrix& b, const KernelSpec& k) {
  auto kv = [&](std::span<const double> u, std::span<const double> v) {
    if (k.kind == KernelKind::linear) {
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
      return s;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d2 += (u[i] - v[i]) * (u[i] - v[i]);
    return std::exp(-k.gamma * d2);
  };
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) saa += kv(a.row(i), a.row(j));
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) sbb += kv(b.row(i), b.row(j));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) sab += kv(a.row(i), b.row(j));
  const double na = double(a.rows()), nb = double(b.rows());
  return saa / (na * na) + sbb / (nb * nb) - 2.0 * sab / (na * nb);
}

TEST(MmdSq, LinearEqualsMeanDistanceOnRandomPairs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ns = 1 + rng() % 20, nt = 1 + rng() % 20, m = 1 + rng() % 8;
    const Matrix a = testing::random_matrix(ns, m, rng(), 2.0);
    const Matrix b = testing::random_matrix(nt, m, rng(), 2.0);
    EXPECT_NEAR(mmd_sq(a, b, KernelSpec::linear()), mean_distance_sq(a, b), 1e-10);
    EXPECT_NEAR(mmd_sq(a, b, KernelSpec::linear()), mmd_by_sums(a, b, KernelSpec::linear()), 1e-9);
    EXPECT_LE(std::abs(mmd_sq(a, a, KernelSpec::linear())), 1e-12);
  }
}

TEST(MmdSq, HandValues) {
  const Matrix a{{0.0, 0.0}, {2.0, 0.0}};
  const Matrix b{{1.0, 3.0}};
  EXPECT_DOUBLE_EQ(mmd_sq(a, b, KernelSpec::linear()), 9.0);
  // rbf with gamma: k(a,a) terms 1 and e^{-4γ}.
  const double g = 0.5;
  const Matrix c{{0.0}, {2.0}};
  const Matrix d{{1.0}};
  const double expect = (2.0 + 2.0 * std::exp(-4.0 * g)) / 4.0 + 1.0 - 2.0 * std::exp(-g);
  EXPECT_NEAR(mmd_sq(c, d, KernelSpec::rbf(g)), expect, 1e-14);
}

TEST(MmdSq, RbfMatchesSumsAndIsNonNegative) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = testing::random_matrix(7, 3, seed);
    const Matrix b = testing::random_matrix(5, 3, seed + 100, 1.5);
    const KernelSpec k = KernelSpec::rbf(0.3);
    EXPECT_NEAR(mmd_sq(a, b, k), mmd_by_sums(a, b, k), 1e-12);
    EXPECT_GE(mmd_sq(a, b, k), -1e-12);
    EXPECT_LE(std::abs(mmd_sq(a, a, k)), 1e-12);
  }
  EXPECT_THROW(KernelSpec::rbf(0.0), ParameterError);
  EXPECT_THROW(mmd_sq(Matrix(0, 2), Matrix(1, 2), KernelSpec::linear()), DimensionError);
  EXPECT_THROW(mmd_sq(Matrix(1, 3), Matrix(1, 2), KernelSpec::linear()), DimensionError);
}

TEST(MmdSqGrad, MatchesFiniteDifferences) {
  for (const KernelSpec& k : {KernelSpec::linear(), KernelSpec::rbf(0.2)}) {
    Matrix a = testing::random_matrix(4, 3, 8);
    Matrix b = testing::random_matrix(6, 3, 9);
    auto [ga, gb] = mmd_sq_grad(a, b, k);
    const double h = 1e-6;
    for (int which = 0; which < 2; ++which) {
      Matrix& x = which == 0 ? a : b;
      const Matrix& g = which == 0 ? ga : gb;
      for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
          const double keep = x(i, j);
          x(i, j) = keep + h;
          const double up = mmd_sq(a, b, k);
          x(i, j) = keep - h;
          const double down = mmd_sq(a, b, k);
          x(i, j) = keep;
          const double numeric = (up - down) / (2.0 * h);
          EXPECT_NEAR(g(i, j), numeric, 1e-6 * std::max(1.0, std::abs(numeric)));
        }
    }
  }
}

TEST(CrossEntropy, HandValues) {
  const std::vector<int> y{1, 0};
  const std::vector<double> p{0.5, 0.5};
  EXPECT_NEAR(cross_entropy(y, p), std::log(2.0), 1e-15);
  const std::vector<double> q{0.9, 0.2};
  EXPECT_NEAR(cross_entropy(y, q), -(std::log(0.9) + std::log(0.8)) / 2.0, 1e-15);
  EXPECT_THROW(cross_entropy(y, std::vector<double>{0.5}), DimensionError);
}

TEST(L1Recon, PerSampleMeanOfAbsoluteErrors) {
  const Matrix x{{1.0, 2.0}, {0.0, 0.0}};
  const Matrix xh{{0.0, 4.0}, {-1.0, 2.0}};
  // Row errors 3 and 3.
  EXPECT_DOUBLE_EQ(l1_recon(x, xh), 3.0);
  EXPECT_THROW(l1_recon(x, Matrix(2, 3)), DimensionError);
}

TEST(TotalLoss, WeightedSum) {
  EXPECT_DOUBLE_EQ(total_loss(1.0, 2.0, 3.0, 0.1, 0.05), 0.1 + 0.1 + 3.0);
  EXPECT_NEAR(total_loss(1.0, 2.0, 3.0, 0.1, 0.1), 3.3, 1e-15);
  EXPECT_THROW(total_loss(1.0, 1.0, 1.0, -0.1, 0.1), ParameterError);
}

}  // namespace
}  // namespace iadt
