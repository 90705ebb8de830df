#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "bayesrl/rng.hpp"

namespace bayesrl {

/// Q[s][a] with the discount it was computed under.
class QTable {
 public:
  QTable(std::size_t n_states, std::size_t n_actions, double discount);
  QTable(std::size_t n_states, std::size_t n_actions, std::vector<double> values,
         double discount);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double discount() const noexcept { return discount_; }

  double operator()(std::size_t s, std::size_t a) const { return values_[s * n_actions_ + a]; }
  double& operator()(std::size_t s, std::size_t a) { return values_[s * n_actions_ + a]; }
  std::span<const double> row(std::size_t s) const;
  std::span<const double> values() const noexcept { return values_; }

  /// argmax_a Q(s, a), lowest index on ties.
  std::size_t greedy_action(std::size_t s) const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> values_;
  double discount_;
};

/// argmax with lowest-index tie-breaking.
std::size_t argmax_lowest(std::span<const double> values);

/// Stationary policy over a finite state space.
class Policy {
 public:
  struct Deterministic {
    std::vector<std::size_t> actions;
    std::size_t n_actions;
  };
  struct Stochastic {
    std::vector<std::vector<double>> probs;
  };
  struct QGreedy {
    QTable q;
  };

  static Policy deterministic(std::vector<std::size_t> actions, std::size_t n_actions);
  /// Each row must sum to 1 within 1e-12.
  static Policy stochastic(std::vector<std::vector<double>> probs);
  static Policy uniform(std::size_t n_states, std::size_t n_actions);
  static Policy q_greedy(QTable q);

  std::size_t n_states() const;
  std::size_t n_actions() const;
  bool is_deterministic() const { return !std::holds_alternative<Stochastic>(rep_); }

  /// Action for state s; the RNG is consumed only by stochastic tables.
  /// Throws DomainError for s outside the policy's domain.
  std::size_t action(std::size_t s, RngStream& rng) const;
  /// Deterministic action; throws StateError for stochastic policies.
  std::size_t action(std::size_t s) const;
  std::vector<double> distribution(std::size_t s) const;

  const auto& representation() const noexcept { return rep_; }

 private:
  explicit Policy(std::variant<Deterministic, Stochastic, QGreedy> rep) : rep_(std::move(rep)) {}
  void check_state(std::size_t s) const;

  std::variant<Deterministic, Stochastic, QGreedy> rep_;
};

/// Free-function form of Policy::action.
inline std::size_t policy_action(const Policy& policy, std::size_t s, RngStream& rng) {
  return policy.action(s, rng);
}

}  // namespace bayesrl
