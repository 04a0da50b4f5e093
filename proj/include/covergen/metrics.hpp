#pragma once

// Frechet Inception Distance and Inception Score over externally produced
// feature / class-probability matrices (one sample per row).

#include <Eigen/Core>
#include <filesystem>
#include <string>

namespace covergen {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ProbMatrix = FeatureMatrix;

struct GaussianStats {
  Eigen::VectorXd mu;
  Eigen::MatrixXd cov;
};

/// Column mean and unbiased sample covariance. Needs at least two rows and
/// finite entries (NumericError otherwise).
GaussianStats gaussian_stats(const FeatureMatrix& features);

/// Principal square root of a symmetric PSD matrix through its symmetric
/// eigendecomposition; negative eigenvalues (roundoff) are clamped to zero.
/// Throws NumericError when `m` is not symmetric within 1e-8 (1 + |m|_max).
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m);

/// |mu_a - mu_b|^2 + Tr(A + B - 2 (A^1/2 B A^1/2)^1/2), clamped at 0.
/// The symmetric form of the cross term has the same trace as (AB)^1/2.
double fid(const GaussianStats& a, const GaussianStats& b);

struct InceptionScore {
  double mean = 0.0;
  double std = 0.0;
};

/// exp(mean KL(p(y|x) || p(y))) per split; mean and population std across
/// splits. Rows must be non-negative and sum to 1 within 1e-6.
InceptionScore inception_score(const ProbMatrix& probs, int splits = 1);

/// `.csv` files are comma separated, one sample per line. Any other
/// extension is raw little-endian float32 with a `<file>.json` sidecar
/// holding `{"rows": r, "cols": c}`.
FeatureMatrix read_matrix(const std::filesystem::path& file);
void write_matrix(const FeatureMatrix& m, const std::filesystem::path& file);

}  // namespace covergen
