#include "bayesrl/gaussian_posterior.hpp"

#include <cmath>
#include <sstream>

#include "bayesrl/errors.hpp"

namespace bayesrl {
namespace {

std::string spectrum_report(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  std::ostringstream os;
  if (eig.info() != Eigen::Success) {
    os << "eigen decomposition failed";
    return os.str();
  }
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  os << "min eigenvalue " << lo << ", max eigenvalue " << hi << ", condition number ";
  if (lo > 0.0)
    os << hi / lo;
  else
    os << "inf";
  return os.str();
}

// Solves precision * mean = rhs and inverts precision through one LLT.
GaussianPosterior from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& rhs,
                                 double noise_sd) {
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw NumericalError("blr_update: posterior precision is not positive definite (" +
                         spectrum_report(precision) + ")");
  Eigen::VectorXd mean = llt.solve(rhs);
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianPosterior(std::move(mean), std::move(cov), noise_sd);
}

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& m, const char* what) {
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + " is not positive definite (" + spectrum_report(m) +
                         ")");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace

GaussianPosterior::GaussianPosterior(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                     double noise_sd)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), noise_sd_(noise_sd) {
  if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size())
    throw NumericalError("GaussianPosterior: covariance shape does not match mean");
  if (!(noise_sd_ > 0.0)) throw DomainError("GaussianPosterior: noise_sd must be positive");
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericalError("GaussianPosterior: covariance is not symmetric");
  const Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success)
    throw NumericalError("GaussianPosterior: covariance is not positive definite (" +
                         spectrum_report(covariance_) + ")");
  chol_ = llt.matrixL();
  for (Eigen::Index i = 0; i < chol_.rows(); ++i)
    if (!(chol_(i, i) > 0.0)) throw NumericalError("GaussianPosterior: zero Cholesky pivot");
}

GaussianPosterior GaussianPosterior::isotropic(std::size_t dim, double variance,
                                               double noise_sd) {
  const auto n = static_cast<Eigen::Index>(dim);
  return GaussianPosterior(Eigen::VectorXd::Zero(n), variance * Eigen::MatrixXd::Identity(n, n),
                           noise_sd);
}

RegressionStatistics::RegressionStatistics(std::size_t dim)
    : xtx_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))),
      xty_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))) {}

void RegressionStatistics::add(std::span<const double> row, double response) {
  if (row.size() != dim()) throw DomainError("RegressionStatistics: row has wrong length");
  const Eigen::Map<const Eigen::VectorXd> x(row.data(), static_cast<Eigen::Index>(row.size()));
  xtx_.noalias() += x * x.transpose();
  xty_ += response * x;
  ++n_rows_;
}

void RegressionStatistics::add(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.cols() != xty_.size() || X.rows() != y.size())
    throw DomainError("RegressionStatistics: design and response shapes disagree");
  xtx_.noalias() += X.transpose() * X;
  xty_.noalias() += X.transpose() * y;
  n_rows_ += static_cast<std::size_t>(X.rows());
}

GaussianPosterior RegressionStatistics::posterior(const GaussianPosterior& prior) const {
  if (prior.dim() != dim()) throw DomainError("RegressionStatistics: prior dimension mismatch");
  const double inv_var = 1.0 / (prior.noise_sd() * prior.noise_sd());
  const Eigen::MatrixXd prior_precision = inverse_spd(prior.covariance(), "prior covariance");
  const Eigen::MatrixXd precision = prior_precision + inv_var * xtx_;
  const Eigen::VectorXd rhs = prior_precision * prior.mean() + inv_var * xty_;
  return from_precision(precision, rhs, prior.noise_sd());
}

GaussianPosterior blr_update(const Eigen::VectorXd& prior_mean, const Eigen::MatrixXd& prior_cov,
                             const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             double noise_sd) {
  return blr_update(GaussianPosterior(prior_mean, prior_cov, noise_sd), X, y);
}

GaussianPosterior blr_update(const GaussianPosterior& prior, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw DomainError("blr_update: X and y lengths differ");
  if (X.rows() > 0 && X.cols() != static_cast<Eigen::Index>(prior.dim()))
    throw DomainError("blr_update: design has wrong column count");
  RegressionStatistics stats(prior.dim());
  if (X.rows() > 0) stats.add(X, y);
  return stats.posterior(prior);
}

Eigen::VectorXd blr_sample(const GaussianPosterior& post, RngStream& rng) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(post.dim()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return post.mean() + post.cholesky() * z;
}

}  // namespace bayesrl
