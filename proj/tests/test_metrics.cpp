#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "covergen/errors.hpp"
#include "covergen/metrics.hpp"
#include "test_util.hpp"

using namespace covergen;

namespace {

Eigen::MatrixXd random_spd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  return a * a.transpose() + 1e-3 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd random_rotation(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

FeatureMatrix random_features(int n, int d, double shift, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix f(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) f(i, j) = g(rng) * (1.0 + 0.3 * j) + shift * (j % 2);
  return f;
}

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// Closed form for diagonal covariances.
double diagonal_oracle(const GaussianStats& a, const GaussianStats& b) {
  double total = 0;
  for (Eigen::Index i = 0; i < a.mu.size(); ++i) {
    const double dm = a.mu(i) - b.mu(i);
    const double ds = std::sqrt(a.cov(i, i)) - std::sqrt(b.cov(i, i));
    total += dm * dm + ds * ds;
  }
  return total;
}

ProbMatrix one_hot(int n, int classes) {
  ProbMatrix p = ProbMatrix::Zero(n, classes);
  for (int i = 0; i < n; ++i) p(i, i % classes) = 1.0;
  return p;
}

}  // namespace

TEST(GaussianStats, HandExample) {
  FeatureMatrix f(2, 1);
  f << 0.0, 2.0;
  const auto s = gaussian_stats(f);
  EXPECT_DOUBLE_EQ(s.mu(0), 1.0);
  EXPECT_DOUBLE_EQ(s.cov(0, 0), 2.0);
}

TEST(GaussianStats, IdenticalRowsGiveZeroCovariance) {
  FeatureMatrix f(5, 3);
  for (int i = 0; i < 5; ++i) f.row(i) << 1.0, -2.0, 3.5;
  EXPECT_TRUE(gaussian_stats(f).cov.isZero(0.0));
}

TEST(GaussianStats, RowPermutationInvariant) {
  std::mt19937_64 rng(1);
  const auto f = random_features(50, 4, 0.0, rng);
  FeatureMatrix g = f.colwise().reverse();
  const auto a = gaussian_stats(f), b = gaussian_stats(g);
  EXPECT_LE((a.mu - b.mu).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((a.cov - b.cov).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GaussianStats, MatchesEigenReference) {
  std::mt19937_64 rng(2);
  const auto f = random_features(300, 6, 1.0, rng);
  const auto s = gaussian_stats(f);
  const Eigen::RowVectorXd mu = f.colwise().mean();
  const Eigen::MatrixXd centered = f.rowwise() - mu;
  const Eigen::MatrixXd cov = centered.transpose() * centered / 299.0;
  EXPECT_LE((s.mu.transpose() - mu).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((s.cov - cov).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GaussianStats, Errors) {
  EXPECT_THROW(gaussian_stats(FeatureMatrix(1, 3)), ContractError);
  FeatureMatrix f = FeatureMatrix::Zero(3, 2);
  f(1, 1) = std::nan("");
  EXPECT_THROW(gaussian_stats(f), NumericError);
}

TEST(MatrixSqrt, IdentityAndDiagonal) {
  EXPECT_TRUE(matrix_sqrt_psd(Eigen::MatrixXd::Identity(4, 4)).isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-14));
  Eigen::MatrixXd d = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  Eigen::MatrixXd r = Eigen::Vector2d(2.0, 3.0).asDiagonal();
  EXPECT_LE((matrix_sqrt_psd(d) - r).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MatrixSqrt, ReconstructionOnRandomSpd) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 16;
    const auto m = random_spd(d, rng);
    const auto r = matrix_sqrt_psd(m);
    EXPECT_LE(inf_norm(r * r - m), 1e-6 * (1.0 + inf_norm(m))) << "d=" << d;
    EXPECT_LE((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(MatrixSqrt, RejectsAsymmetric) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0.5, 0, 1;
  EXPECT_THROW(matrix_sqrt_psd(m), NumericError);
}

TEST(MatrixSqrt, ClampsTinyNegativeEigenvalues) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 1 - 1e-15;
  const auto r = matrix_sqrt_psd(m);
  EXPECT_TRUE(r.allFinite());
}

TEST(Fid, SelfDistanceIsZero) {
  std::mt19937_64 rng(4);
  const auto s = gaussian_stats(random_features(200, 8, 0.0, rng));
  EXPECT_LE(fid(s, s), 1e-6);
}

TEST(Fid, OneDimensionalClosedForm) {
  GaussianStats a{Eigen::VectorXd::Constant(1, 0.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  GaussianStats b{Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  EXPECT_NEAR(fid(a, b), 1.0, 1e-9);
}

TEST(Fid, DiagonalCovariancesMatchClosedForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 8;
    GaussianStats a{Eigen::VectorXd(d), Eigen::MatrixXd::Zero(d, d)};
    GaussianStats b{Eigen::VectorXd(d), Eigen::MatrixXd::Zero(d, d)};
    for (int i = 0; i < d; ++i) {
      a.mu(i) = u(rng) - 2;
      b.mu(i) = u(rng) - 2;
      a.cov(i, i) = u(rng);
      b.cov(i, i) = u(rng);
    }
    EXPECT_NEAR(fid(a, b), diagonal_oracle(a, b), 1e-6);
  }
}

TEST(Fid, SymmetricAndRotationInvariant) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 7;
    const auto fa = random_features(400, d, 0.0, rng);
    const auto fb = random_features(400, d, 0.7, rng);
    const auto a = gaussian_stats(fa), b = gaussian_stats(fb);
    EXPECT_NEAR(fid(a, b), fid(b, a), 1e-6);
    const Eigen::MatrixXd q = random_rotation(d, rng);
    const FeatureMatrix ra = fa * q, rb = fb * q;
    EXPECT_NEAR(fid(gaussian_stats(ra), gaussian_stats(rb)), fid(a, b), 1e-5);
    EXPECT_GE(fid(a, b), 0.0);
  }
}

TEST(Fid, DimensionMismatch) {
  GaussianStats a{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  GaussianStats b{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
  EXPECT_THROW(fid(a, b), ContractError);
}

TEST(InceptionScore, UniformRowsScoreOne) {
  ProbMatrix p = ProbMatrix::Constant(40, 5, 0.2);
  const auto s = inception_score(p);
  EXPECT_NEAR(s.mean, 1.0, 1e-9);
  EXPECT_NEAR(s.std, 0.0, 1e-12);
}

TEST(InceptionScore, BalancedOneHotScoresClassCount) {
  EXPECT_NEAR(inception_score(one_hot(400, 4)).mean, 4.0, 1e-6);
}

TEST(InceptionScore, DuplicatedRowsUnchanged) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  ProbMatrix p(30, 6);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 6; ++j) p(i, j) = u(rng);
    p.row(i) /= p.row(i).sum();
  }
  ProbMatrix twice(60, 6);
  twice << p, p;
  EXPECT_NEAR(inception_score(twice).mean, inception_score(p).mean, 1e-12);
}

TEST(InceptionScore, AlwaysWithinOneAndClassCount) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = 2 + trial % 9;
    const int n = 10 + trial % 50;
    ProbMatrix p(n, c);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < c; ++j) p(i, j) = std::pow(u(rng), 1 + trial % 5);
      p(i, trial % c) += 1e-3;
      p.row(i) /= p.row(i).sum();
    }
    const int splits = 1 + trial % 4;
    const auto s = inception_score(p, splits);
    EXPECT_GE(s.mean, 1.0 - 1e-9);
    EXPECT_LE(s.mean, c + 1e-9);
  }
}

TEST(InceptionScore, SplitsAndErrors) {
  // Two splits: first half one-hot over 2 classes, second half uniform.
  ProbMatrix p(8, 2);
  p << 1, 0, 0, 1, 1, 0, 0, 1, .5, .5, .5, .5, .5, .5, .5, .5;
  const auto s = inception_score(p, 2);
  EXPECT_NEAR(s.mean, 1.5, 1e-12);
  EXPECT_NEAR(s.std, 0.5, 1e-12);
  EXPECT_THROW(inception_score(p, 9), ContractError);
  EXPECT_THROW(inception_score(p, 0), ContractError);
  p(0, 0) = 0.7;
  EXPECT_THROW(inception_score(p), ContractError);
}

TEST(MatrixIo, CsvAndRawRoundTrip) {
  testutil::TempDir dir;
  std::mt19937_64 rng(9);
  const auto f = random_features(7, 3, 0.0, rng);
  write_matrix(f, dir / "f.csv");
  const auto csv = read_matrix(dir / "f.csv");
  EXPECT_LE((csv - f).cwiseAbs().maxCoeff(), 1e-12);
  write_matrix(f, dir / "f.bin");
  const auto raw = read_matrix(dir / "f.bin");
  EXPECT_LE((raw - f).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_EQ(raw.rows(), 7);
  EXPECT_EQ(raw.cols(), 3);
}

TEST(MatrixIo, CsvWithHeaderAndBadRows) {
  testutil::TempDir dir;
  testutil::write_file(dir / "h.csv", "a,b\n1,2\n3,4\n");
  const auto m = read_matrix(dir / "h.csv");
  EXPECT_EQ(m.rows(), 2);
  EXPECT_EQ(m(1, 0), 3.0);
  testutil::write_file(dir / "bad.csv", "1,2\n3\n");
  EXPECT_THROW(read_matrix(dir / "bad.csv"), InputError);
}
