#include "bayesrl/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayesrl/errors.hpp"
#include "bayesrl/kernels.hpp"

namespace bayesrl {
namespace {

constexpr int kCutAttempts = 8;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -1.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const double> y, const RegressorConfig& config,
              RngStream rng)
      : x_(x), y_(y), config_(config), rng_(std::move(rng)) {}

  ExtraTreesRegressor::Tree build() {
    std::vector<std::size_t> idx(x_.rows());
    std::iota(idx.begin(), idx.end(), 0);
    tree_.clear();
    grow(idx, 0, idx.size());
    return std::move(tree_);
  }

 private:
  std::size_t grow(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
    const std::size_t node = tree_.size();
    tree_.emplace_back();
    const std::size_t n = end - begin;

    double sum = 0.0;
    double lo = y_[idx[begin]];
    double hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = y_[idx[i]];
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    tree_[node].value = sum / static_cast<double>(n);
    if (n < 2 * config_.min_leaf || lo == hi) return node;

    const Split split = choose_split(idx, begin, end, sum);
    if (split.feature < 0) return node;

    const auto mid_it = std::partition(
        idx.begin() + static_cast<std::ptrdiff_t>(begin), idx.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t i) { return x_(i, static_cast<std::size_t>(split.feature)) < split.threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - idx.begin());

    tree_[node].feature = split.feature;
    tree_[node].threshold = split.threshold;
    const std::size_t left = grow(idx, begin, mid);
    const std::size_t right = grow(idx, mid, end);
    tree_[node].left = left;
    tree_[node].right = right;
    return node;
  }

  Split choose_split(const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
                     double total) {
    const std::size_t d = x_.cols();
    std::vector<double> fmin(d, INFINITY), fmax(d, -INFINITY);
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = x_.row(idx[i]);
      for (std::size_t f = 0; f < d; ++f) {
        fmin[f] = std::min(fmin[f], row[f]);
        fmax[f] = std::max(fmax[f], row[f]);
      }
    }
    std::vector<std::size_t> features;
    for (std::size_t f = 0; f < d; ++f)
      if (fmax[f] > fmin[f]) features.push_back(f);

    Split best;
    std::size_t scored = 0;
    const std::size_t wanted = config_.split_candidates == 0 ? d : config_.split_candidates;
    // Features are visited in random order; those that admit no valid cut
    // do not use up one of the K candidate slots.
    for (std::size_t k = 0; k < features.size() && scored < wanted; ++k) {
      const std::size_t pick = k + rng_.uniform_index(features.size() - k);
      std::swap(features[k], features[pick]);
      const std::size_t f = features[k];
      for (int attempt = 0; attempt < kCutAttempts; ++attempt) {
        const double cut = fmin[f] + rng_.uniform() * (fmax[f] - fmin[f]);
        if (!(cut > fmin[f])) continue;
        std::size_t n_left = 0;
        double sum_left = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          if (x_(idx[i], f) < cut) {
            ++n_left;
            sum_left += y_[idx[i]];
          }
        }
        const std::size_t n_right = (end - begin) - n_left;
        if (n_left < config_.min_leaf || n_right < config_.min_leaf) continue;
        const double sum_right = total - sum_left;
        const double score = sum_left * sum_left / static_cast<double>(n_left) +
                             sum_right * sum_right / static_cast<double>(n_right);
        if (best.feature < 0 || score > best.score) best = {static_cast<int>(f), cut, score};
        ++scored;
        break;
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const double> y_;
  const RegressorConfig& config_;
  RngStream rng_;
  ExtraTreesRegressor::Tree tree_;
};

void check_training_data(const FeatureMatrix& x, std::span<const double> y) {
  if (x.rows() == 0) throw DomainError("regressor: empty training set");
  if (x.rows() != y.size()) throw DomainError("regressor: feature and target counts differ");
}

}  // namespace

ExtraTreesRegressor ExtraTreesRegressor::fit(const FeatureMatrix& x, std::span<const double> y,
                                             const RegressorConfig& config, const RngStream& rng) {
  check_training_data(x, y);
  if (config.n_trees == 0) throw DomainError("ExtraTreesRegressor: need at least one tree");
  ExtraTreesRegressor out;
  out.n_features_ = x.cols();
  out.trees_.reserve(config.n_trees);
  for (std::size_t t = 0; t < config.n_trees; ++t)
    out.trees_.push_back(TreeBuilder(x, y, config, rng.substream(t)).build());
  return out;
}

double ExtraTreesRegressor::predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& tree : trees_) {
    std::size_t node = 0;
    while (tree[node].feature >= 0)
      node = x[static_cast<std::size_t>(tree[node].feature)] < tree[node].threshold ? tree[node].left
                                                                                   : tree[node].right;
    sum += tree[node].value;
  }
  return sum / static_cast<double>(trees_.size());
}

KnnRegressor KnnRegressor::fit(const FeatureMatrix& x, std::span<const double> y, std::size_t k) {
  check_training_data(x, y);
  if (k == 0) throw DomainError("KnnRegressor: k must be positive");
  KnnRegressor out;
  out.k_ = std::min(k, x.rows());
  out.targets_.assign(y.begin(), y.end());
  const std::size_t n = x.rows();
  for (std::size_t f = 0; f < x.cols(); ++f) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, f);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x(i, f) - mean) * (x(i, f) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    const double inv = sd > 0.0 ? 1.0 / sd : 0.0;
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = (x(i, f) - mean) * inv;
    out.columns_.push_back(std::move(col));
    out.center_.push_back(mean);
    out.inv_scale_.push_back(inv);
  }
  return out;
}

double KnnRegressor::predict(std::span<const double> x) const {
  const std::size_t n = targets_.size();
  std::vector<double> dist(n, 0.0);
  for (std::size_t f = 0; f < columns_.size(); ++f)
    kernels::add_squared_diff(dist, columns_[f], (x[f] - center_[f]) * inv_scale_[f]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Index order breaks distance ties so predictions are deterministic.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });
  double sum = 0.0;
  for (std::size_t i = 0; i < k_; ++i) sum += targets_[order[i]];
  return sum / static_cast<double>(k_);
}

std::unique_ptr<Regressor> fit_regressor(const FeatureMatrix& x, std::span<const double> y,
                                         const RegressorConfig& config, const RngStream& rng) {
  if (config.kind == RegressorConfig::Kind::knn)
    return std::make_unique<KnnRegressor>(KnnRegressor::fit(x, y, config.k_neighbors));
  return std::make_unique<ExtraTreesRegressor>(ExtraTreesRegressor::fit(x, y, config, rng));
}

}  // namespace bayesrl
