#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bayesrl/rng.hpp"

namespace bayesrl {

/// Finite MDP with an explicit transition tensor P[s][a][s'], reward table
/// R[s][a] and discount factor. Immutable after construction.
class FiniteMdpModel {
 public:
  /// `transition` is row-major [s][a][s'], `reward` is [s][a]. Throws
  /// DomainError if a row is not a probability vector (tolerance 1e-12), a
  /// reward is not finite, or the discount is outside (0, 1).
  FiniteMdpModel(std::size_t n_states, std::size_t n_actions, std::vector<double> transition,
                 std::vector<double> reward, double discount);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double discount() const noexcept { return discount_; }

  std::span<const double> next_distribution(std::size_t s, std::size_t a) const;
  double probability(std::size_t s, std::size_t a, std::size_t next) const;
  double reward(std::size_t s, std::size_t a) const;
  double max_abs_reward() const noexcept { return max_abs_reward_; }

  std::span<const double> transition_tensor() const noexcept { return transition_; }
  std::span<const double> reward_table() const noexcept { return reward_; }

 private:
  void check_indices(std::size_t s, std::size_t a) const;

  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double discount_;
  double max_abs_reward_ = 0.0;
};

struct StepResult {
  std::size_t next_state;
  double reward;
};

/// Draws S' ~ P[s][a][.] by inverse CDF and returns it with R[s][a].
/// Throws IndexError for out-of-range indices.
StepResult step_finite(const FiniteMdpModel& model, std::size_t s, std::size_t a,
                       RngStream& rng);

/// Inverse-CDF draw from a discrete distribution given one uniform in [0,1).
/// Returns the last index with positive mass if rounding leaves u past the end.
std::size_t sample_discrete(std::span<const double> probs, double u);

}  // namespace bayesrl
