#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bayesrl/environments.hpp"
#include "bayesrl/rng.hpp"

namespace bayesrl {

/// Support points of one parameter dimension with the per-point terms the
/// Bernoulli likelihood needs.
struct ParameterGrid {
  std::vector<double> points;
  std::vector<double> log_point;       // log g
  std::vector<double> log_complement;  // log(1 - g)
  std::vector<double> log_prior;       // unnormalized; -inf excludes a point

  /// n equally spaced points over [lower, upper] with a flat prior.
  static ParameterGrid uniform(std::size_t n, double lower = kThetaLower,
                               double upper = kThetaUpper);
  std::size_t size() const noexcept { return points.size(); }
  std::size_t nearest(double theta) const;
};

/// Success/failure counts per Bernoulli transition parameter. Counts only grow.
class SufficientCounts {
 public:
  explicit SufficientCounts(std::size_t n_params) : successes_(n_params, 0), failures_(n_params, 0) {}

  void add(std::size_t param, bool success, std::uint64_t times = 1);
  void add(const CountUpdate& update) { add(update.param, update.success); }
  SufficientCounts& operator+=(const SufficientCounts& other);

  std::size_t n_params() const noexcept { return successes_.size(); }
  std::uint64_t successes(std::size_t k) const { return successes_.at(k); }
  std::uint64_t failures(std::size_t k) const { return failures_.at(k); }
  std::uint64_t total() const;

 private:
  std::vector<std::uint64_t> successes_;
  std::vector<std::uint64_t> failures_;
};

/// Discretized posterior over a 1- or 2-dimensional parameter with
/// independent per-dimension priors. Cells are row-major over the grid
/// product (the last dimension varies fastest).
class GridPosterior {
 public:
  static GridPosterior uniform(std::size_t dims, std::size_t points_per_dim);
  /// All prior mass on the grid cell nearest to theta.
  static GridPosterior point_mass(std::span<const double> theta, std::size_t points_per_dim);
  /// Unnormalized posterior from raw log weights over the grid product.
  static GridPosterior from_log_weights(std::vector<ParameterGrid> grids,
                                        std::vector<double> log_weights);

  /// Max-subtracted log-space normalization. Throws NumericalError if every
  /// weight is zero.
  GridPosterior normalized() const;
  bool is_normalized() const noexcept { return normalized_; }

  std::size_t dims() const noexcept { return grids_.size(); }
  std::size_t size() const noexcept { return log_weights_.size(); }
  const ParameterGrid& grid(std::size_t d) const { return grids_.at(d); }
  const std::vector<ParameterGrid>& grids() const noexcept { return grids_; }

  std::span<const double> log_weights() const noexcept { return log_weights_; }
  /// exp(log_weights); empty until normalized.
  std::span<const double> probabilities() const noexcept { return probabilities_; }

  std::vector<double> point(std::size_t cell) const;
  std::size_t nearest_cell(std::span<const double> theta) const;
  std::vector<double> marginal(std::size_t dim) const;
  double mean(std::size_t dim) const;

  /// Inverse-CDF draw of a cell index. Throws StateError if unnormalized.
  std::size_t sample_cell(RngStream& rng) const;

 private:
  friend GridPosterior grid_update(const GridPosterior&, const SufficientCounts&);

  GridPosterior(std::vector<ParameterGrid> grids, std::vector<double> log_weights);
  void normalize_in_place();

  std::vector<ParameterGrid> grids_;
  std::vector<double> log_weights_;
  std::vector<double> probabilities_;
  std::vector<double> block_totals_;
  bool normalized_ = false;
};

/// Posterior under the prior carried by `post` and the given counts,
/// recomputed from scratch: log prior + sum_k succ_k log g + fail_k log(1 - g).
/// Parameter k of the counts maps to grid dimension k.
GridPosterior grid_update(const GridPosterior& post, const SufficientCounts& counts);

/// Grid point drawn from the posterior (no within-cell jitter).
std::vector<double> grid_sample(const GridPosterior& post, RngStream& rng);

}  // namespace bayesrl
