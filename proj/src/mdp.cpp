#include "bayesrl/mdp.hpp"

#include <cmath>
#include <string>

#include "bayesrl/errors.hpp"

namespace bayesrl {

FiniteMdpModel::FiniteMdpModel(std::size_t n_states, std::size_t n_actions,
                               std::vector<double> transition, std::vector<double> reward,
                               double discount)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      discount_(discount) {
  if (n_states_ == 0 || n_actions_ == 0)
    throw DomainError("FiniteMdpModel: state and action counts must be positive");
  if (transition_.size() != n_states_ * n_actions_ * n_states_)
    throw DomainError("FiniteMdpModel: transition tensor has wrong size");
  if (reward_.size() != n_states_ * n_actions_)
    throw DomainError("FiniteMdpModel: reward table has wrong size");
  if (!(discount_ > 0.0 && discount_ < 1.0))
    throw DomainError("FiniteMdpModel: discount must lie in (0, 1)");

  for (std::size_t s = 0; s < n_states_; ++s) {
    for (std::size_t a = 0; a < n_actions_; ++a) {
      double total = 0.0;
      for (double p : next_distribution(s, a)) {
        if (!(p >= 0.0)) throw DomainError("FiniteMdpModel: negative transition probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("FiniteMdpModel: row (" + std::to_string(s) + ", " +
                          std::to_string(a) + ") sums to " + std::to_string(total));
    }
  }
  for (double r : reward_) {
    if (!std::isfinite(r)) throw DomainError("FiniteMdpModel: non-finite reward");
    max_abs_reward_ = std::max(max_abs_reward_, std::abs(r));
  }
}

void FiniteMdpModel::check_indices(std::size_t s, std::size_t a) const {
  if (s >= n_states_) throw IndexError("state index " + std::to_string(s) + " out of range");
  if (a >= n_actions_) throw IndexError("action index " + std::to_string(a) + " out of range");
}

std::span<const double> FiniteMdpModel::next_distribution(std::size_t s, std::size_t a) const {
  check_indices(s, a);
  return std::span<const double>(transition_).subspan((s * n_actions_ + a) * n_states_, n_states_);
}

double FiniteMdpModel::probability(std::size_t s, std::size_t a, std::size_t next) const {
  if (next >= n_states_) throw IndexError("state index " + std::to_string(next) + " out of range");
  return next_distribution(s, a)[next];
}

double FiniteMdpModel::reward(std::size_t s, std::size_t a) const {
  check_indices(s, a);
  return reward_[s * n_actions_ + a];
}

std::size_t sample_discrete(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

StepResult step_finite(const FiniteMdpModel& model, std::size_t s, std::size_t a,
                       RngStream& rng) {
  const auto row = model.next_distribution(s, a);
  return {sample_discrete(row, rng.uniform()), model.reward(s, a)};
}

}  // namespace bayesrl
