#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "bayesrl/glucose.hpp"
#include "bayesrl/regression.hpp"
#include "bayesrl/rng.hpp"

namespace bayesrl {

/// One (S, A, R, S') sample in feature space.
struct TransitionTuple {
  std::vector<double> state;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
};

struct FqiConfig {
  std::size_t n_iterations = 5;
  double gamma = 0.9;
  std::size_t n_actions = 2;
  /// Backup targets are clipped to [-target_clip, target_clip].
  double target_clip = 1000.0;
  RegressorConfig regressor;
};

/// Final Q-hat of fitted Q iteration: one regressor per action, each mapping
/// state features to the value of taking that action.
class FittedQ {
 public:
  FittedQ(std::vector<std::shared_ptr<const Regressor>> per_action, std::size_t n_iterations);

  std::size_t n_actions() const noexcept { return per_action_.size(); }
  std::size_t n_iterations() const noexcept { return n_iterations_; }
  /// -inf for an action that never appeared in the training data.
  double value(std::span<const double> state, std::size_t action) const;
  /// argmax_a value(state, a), lowest index on ties.
  std::size_t act(std::span<const double> state) const;

 private:
  std::vector<std::shared_ptr<const Regressor>> per_action_;
  std::size_t n_iterations_;
};

/// Iteration k regresses r + gamma * max_a Qhat_{k-1}(s', a) on the tuples,
/// with Qhat_0 = 0. Every iteration draws its trees from the same streams, so
/// with gamma = 0 the result does not depend on n_iterations.
FittedQ fitted_q_iteration(std::span<const TransitionTuple> data, const FqiConfig& config,
                           const RngStream& rng);

std::size_t fitted_q_act(const FittedQ& q, std::span<const double> state);
int fitted_q_act(const FittedQ& q, const GlucoseState& s);

struct DatasetConfig {
  std::size_t n_tuples = 2000;
  std::size_t episode_length = 30;
  /// Probability of the insulin action in the behaviour policy.
  double action_probability = 0.5;
};

/// Random-action rollouts under `dynamics`, restarted from the initial-state
/// distribution every episode_length steps. Returns exactly n_tuples tuples.
std::vector<TransitionTuple> simulate_dataset(const GlucoseParams& dynamics,
                                              const DatasetConfig& config, RngStream& rng);

TransitionTuple glucose_tuple(const GlucoseState& s, int action, double reward,
                              const GlucoseState& next);

}  // namespace bayesrl
