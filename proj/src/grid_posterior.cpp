#include "bayesrl/grid_posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bayesrl/errors.hpp"
#include "bayesrl/kernels.hpp"

namespace bayesrl {
namespace {

constexpr std::size_t kSampleBlock = 256;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

ParameterGrid ParameterGrid::uniform(std::size_t n, double lower, double upper) {
  if (n == 0) throw DomainError("ParameterGrid: need at least one point");
  if (!(lower > 0.0 && upper < 1.0 && lower <= upper))
    throw DomainError("ParameterGrid: bounds must lie inside (0, 1)");
  ParameterGrid g;
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.points[i] = n == 1 ? 0.5 * (lower + upper)
                         : lower + (upper - lower) * static_cast<double>(i) /
                                       static_cast<double>(n - 1);
  }
  if (n > 1) g.points.back() = upper;
  g.log_point.resize(n);
  g.log_complement.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.log_point[i] = std::log(g.points[i]);
    g.log_complement[i] = std::log1p(-g.points[i]);
  }
  g.log_prior.assign(n, 0.0);
  return g;
}

std::size_t ParameterGrid::nearest(double theta) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (std::abs(points[i] - theta) < std::abs(points[best] - theta)) best = i;
  return best;
}

void SufficientCounts::add(std::size_t param, bool success, std::uint64_t times) {
  if (param >= successes_.size()) throw IndexError("SufficientCounts: parameter out of range");
  (success ? successes_ : failures_)[param] += times;
}

SufficientCounts& SufficientCounts::operator+=(const SufficientCounts& other) {
  if (other.n_params() != n_params()) throw DomainError("SufficientCounts: dimension mismatch");
  for (std::size_t k = 0; k < n_params(); ++k) {
    successes_[k] += other.successes_[k];
    failures_[k] += other.failures_[k];
  }
  return *this;
}

std::uint64_t SufficientCounts::total() const {
  std::uint64_t t = 0;
  for (std::size_t k = 0; k < n_params(); ++k) t += successes_[k] + failures_[k];
  return t;
}

GridPosterior::GridPosterior(std::vector<ParameterGrid> grids, std::vector<double> log_weights)
    : grids_(std::move(grids)), log_weights_(std::move(log_weights)) {
  if (grids_.empty() || grids_.size() > 2)
    throw DomainError("GridPosterior: only 1- and 2-dimensional grids are supported");
  std::size_t cells = 1;
  for (const auto& g : grids_) cells *= g.size();
  if (log_weights_.size() != cells) throw DomainError("GridPosterior: weight count mismatch");
}

GridPosterior GridPosterior::from_log_weights(std::vector<ParameterGrid> grids,
                                              std::vector<double> log_weights) {
  return GridPosterior(std::move(grids), std::move(log_weights));
}

GridPosterior GridPosterior::uniform(std::size_t dims, std::size_t points_per_dim) {
  std::vector<ParameterGrid> grids(dims, ParameterGrid::uniform(points_per_dim));
  std::size_t cells = 1;
  for (std::size_t d = 0; d < dims; ++d) cells *= points_per_dim;
  return grid_update(GridPosterior(std::move(grids), std::vector<double>(cells, 0.0)),
                     SufficientCounts(dims));
}

GridPosterior GridPosterior::point_mass(std::span<const double> theta,
                                        std::size_t points_per_dim) {
  std::vector<ParameterGrid> grids;
  std::size_t cells = 1;
  for (double t : theta) {
    auto g = ParameterGrid::uniform(points_per_dim);
    std::fill(g.log_prior.begin(), g.log_prior.end(), kNegInf);
    g.log_prior[g.nearest(t)] = 0.0;
    grids.push_back(std::move(g));
    cells *= points_per_dim;
  }
  return grid_update(GridPosterior(std::move(grids), std::vector<double>(cells, 0.0)),
                     SufficientCounts(theta.size()));
}

void GridPosterior::normalize_in_place() {
  const double top = kernels::max_value(log_weights_);
  if (!(top > kNegInf) || !std::isfinite(top))
    throw NumericalError("GridPosterior: all weights vanished or are not finite");
  probabilities_.resize(log_weights_.size());
  const double total = kernels::exp_shift_sum(probabilities_, log_weights_, top);
  kernels::scale(probabilities_, 1.0 / total);
  kernels::add_scalar(log_weights_, -top - std::log(total));

  block_totals_.assign((probabilities_.size() + kSampleBlock - 1) / kSampleBlock, 0.0);
  for (std::size_t i = 0; i < probabilities_.size(); ++i)
    block_totals_[i / kSampleBlock] += probabilities_[i];
  normalized_ = true;
}

GridPosterior GridPosterior::normalized() const {
  GridPosterior out = *this;
  out.normalize_in_place();
  return out;
}

std::vector<double> GridPosterior::point(std::size_t cell) const {
  if (cell >= size()) throw IndexError("GridPosterior: cell out of range");
  if (dims() == 1) return {grids_[0].points[cell]};
  const std::size_t n1 = grids_[1].size();
  return {grids_[0].points[cell / n1], grids_[1].points[cell % n1]};
}

std::size_t GridPosterior::nearest_cell(std::span<const double> theta) const {
  if (theta.size() != dims()) throw DomainError("GridPosterior: dimension mismatch");
  if (dims() == 1) return grids_[0].nearest(theta[0]);
  return grids_[0].nearest(theta[0]) * grids_[1].size() + grids_[1].nearest(theta[1]);
}

std::vector<double> GridPosterior::marginal(std::size_t dim) const {
  if (!normalized_) throw StateError("GridPosterior: marginal of an unnormalized posterior");
  if (dim >= dims()) throw IndexError("GridPosterior: dimension out of range");
  if (dims() == 1) return probabilities_;
  const std::size_t n0 = grids_[0].size();
  const std::size_t n1 = grids_[1].size();
  std::vector<double> out(dim == 0 ? n0 : n1, 0.0);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) out[dim == 0 ? i : j] += probabilities_[i * n1 + j];
  return out;
}

double GridPosterior::mean(std::size_t dim) const {
  const auto m = marginal(dim);
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) acc += m[i] * grids_[dim].points[i];
  return acc;
}

std::size_t GridPosterior::sample_cell(RngStream& rng) const {
  if (!normalized_) throw StateError("GridPosterior: sampling an unnormalized posterior");
  double total = 0.0;
  for (double b : block_totals_) total += b;
  const double target = rng.uniform() * total;

  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t b = 0; b < block_totals_.size(); ++b) {
    if (block_totals_[b] <= 0.0) continue;
    const std::size_t begin = b * kSampleBlock;
    const std::size_t end = std::min(begin + kSampleBlock, probabilities_.size());
    if (target < cumulative + block_totals_[b]) {
      for (std::size_t i = begin; i < end; ++i) {
        if (probabilities_[i] <= 0.0) continue;
        cumulative += probabilities_[i];
        last_positive = i;
        if (target < cumulative) return i;
      }
      // Rounding inside the block: keep the last positive cell seen.
      return last_positive;
    }
    cumulative += block_totals_[b];
    for (std::size_t i = end; i-- > begin;)
      if (probabilities_[i] > 0.0) {
        last_positive = i;
        break;
      }
  }
  return last_positive;
}

GridPosterior grid_update(const GridPosterior& post, const SufficientCounts& counts) {
  if (counts.n_params() != post.dims())
    throw DomainError("grid_update: counts do not match the posterior's dimension");
  std::vector<std::vector<double>> rows;
  rows.reserve(post.dims());
  for (std::size_t d = 0; d < post.dims(); ++d) {
    const auto& g = post.grid(d);
    std::vector<double> row(g.size());
    kernels::affine2(row, g.log_prior, g.log_point, g.log_complement,
                     static_cast<double>(counts.successes(d)),
                     static_cast<double>(counts.failures(d)));
    rows.push_back(std::move(row));
  }
  std::vector<double> log_weights;
  if (post.dims() == 1) {
    log_weights = std::move(rows[0]);
  } else {
    log_weights.resize(rows[0].size() * rows[1].size());
    kernels::outer_sum(log_weights, rows[0], rows[1]);
  }
  GridPosterior out(post.grids_, std::move(log_weights));
  out.normalize_in_place();
  return out;
}

std::vector<double> grid_sample(const GridPosterior& post, RngStream& rng) {
  return post.point(post.sample_cell(rng));
}

}  // namespace bayesrl
