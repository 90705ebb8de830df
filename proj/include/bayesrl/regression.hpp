#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "bayesrl/rng.hpp"

namespace bayesrl {

/// Dense row-major design matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::span<double> row(std::size_t r) { return std::span<double>(data_).subspan(r * cols_, cols_); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct RegressorConfig {
  enum class Kind { extra_trees, knn };
  Kind kind = Kind::extra_trees;
  std::size_t n_trees = 25;
  /// Nodes are split only if both children keep at least this many samples.
  std::size_t min_leaf = 5;
  /// Random (feature, cut) candidates scored per node; 1 gives totally
  /// randomized trees, 0 means one candidate per feature (Extra-Trees with
  /// K = number of inputs).
  std::size_t split_candidates = 0;
  std::size_t k_neighbors = 10;
};

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual double predict(std::span<const double> x) const = 0;
  virtual std::size_t n_features() const = 0;
};

/// Ensemble of randomized regression trees (Geurts, Ernst & Wehenkel 2006).
class ExtraTreesRegressor final : public Regressor {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  /// Tree j draws from rng.substream(j).
  static ExtraTreesRegressor fit(const FeatureMatrix& x, std::span<const double> y,
                                 const RegressorConfig& config, const RngStream& rng);

  double predict(std::span<const double> x) const override;
  std::size_t n_features() const override { return n_features_; }
  const std::vector<Tree>& trees() const noexcept { return trees_; }

 private:
  std::vector<Tree> trees_;
  std::size_t n_features_ = 0;
};

/// k-nearest-neighbour mean on z-scored features.
class KnnRegressor final : public Regressor {
 public:
  static KnnRegressor fit(const FeatureMatrix& x, std::span<const double> y, std::size_t k);

  double predict(std::span<const double> x) const override;
  std::size_t n_features() const override { return columns_.size(); }

 private:
  std::vector<std::vector<double>> columns_;  // standardized, column-major
  std::vector<double> center_;
  std::vector<double> inv_scale_;
  std::vector<double> targets_;
  std::size_t k_ = 10;
};

std::unique_ptr<Regressor> fit_regressor(const FeatureMatrix& x, std::span<const double> y,
                                         const RegressorConfig& config, const RngStream& rng);

}  // namespace bayesrl
