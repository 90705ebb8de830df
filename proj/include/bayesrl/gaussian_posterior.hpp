#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

#include "bayesrl/rng.hpp"

namespace bayesrl {

/// N(mean, covariance) over regression coefficients, with the known
/// observation noise standard deviation it was (or will be) updated under.
class GaussianPosterior {
 public:
  /// Throws NumericalError unless the covariance is symmetric within 1e-10
  /// and has a Cholesky factor with positive pivots.
  GaussianPosterior(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double noise_sd);

  /// N(0, variance * I).
  static GaussianPosterior isotropic(std::size_t dim, double variance, double noise_sd);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  /// Lower Cholesky factor of the covariance.
  const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }
  double noise_sd() const noexcept { return noise_sd_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_;
  double noise_sd_;
};

/// Running X'X and X'y of a linear-Gaussian regression. Adding rows in any
/// order or batch split yields the same posterior.
class RegressionStatistics {
 public:
  explicit RegressionStatistics(std::size_t dim);

  void add(std::span<const double> row, double response);
  void add(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(xty_.size()); }
  std::size_t n_rows() const noexcept { return n_rows_; }
  const Eigen::MatrixXd& xtx() const noexcept { return xtx_; }
  const Eigen::VectorXd& xty() const noexcept { return xty_; }

  /// Conjugate update of `prior` under the prior's noise_sd.
  GaussianPosterior posterior(const GaussianPosterior& prior) const;

 private:
  Eigen::MatrixXd xtx_;
  Eigen::VectorXd xty_;
  std::size_t n_rows_ = 0;
};

/// Known-noise conjugate update: precision = prior precision + X'X / sigma^2,
/// mean solves precision * m = prior precision * prior mean + X'y / sigma^2.
/// Throws NumericalError (with eigenvalue/condition report) if the posterior
/// precision is not positive definite.
GaussianPosterior blr_update(const Eigen::VectorXd& prior_mean, const Eigen::MatrixXd& prior_cov,
                             const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             double noise_sd);

GaussianPosterior blr_update(const GaussianPosterior& prior, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y);

/// mean + L z, z ~ N(0, I).
Eigen::VectorXd blr_sample(const GaussianPosterior& post, RngStream& rng);

}  // namespace bayesrl
