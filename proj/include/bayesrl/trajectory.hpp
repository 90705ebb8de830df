#pragma once

#include <cstddef>
#include <vector>

#include "bayesrl/errors.hpp"

namespace bayesrl {

/// History H_t = (S_0, A_0, R_0, ..., S_t). Appends must follow
/// state, action, reward, next state; after every complete step
/// |states| = |actions| + 1 = |rewards| + 1.
template <class State>
class BasicTrajectory {
 public:
  BasicTrajectory() = default;
  explicit BasicTrajectory(State initial) { states_.push_back(std::move(initial)); }

  void push_action(std::size_t a) {
    if (states_.empty() || actions_.size() != states_.size() - 1)
      throw StateError("Trajectory: action appended out of order");
    actions_.push_back(a);
  }
  void push_reward(double r) {
    if (rewards_.size() + 1 != actions_.size())
      throw StateError("Trajectory: reward appended out of order");
    rewards_.push_back(r);
  }
  void push_state(State s) {
    if (!states_.empty() && rewards_.size() != states_.size())
      throw StateError("Trajectory: state appended out of order");
    states_.push_back(std::move(s));
  }
  /// One complete step: A_t, R_t, S_{t+1}.
  void record(std::size_t a, double r, State next) {
    push_action(a);
    push_reward(r);
    push_state(std::move(next));
  }

  /// Number of completed steps.
  std::size_t length() const noexcept { return actions_.size(); }
  bool consistent() const noexcept {
    return states_.size() == actions_.size() + 1 && actions_.size() == rewards_.size();
  }

  const std::vector<State>& states() const noexcept { return states_; }
  const std::vector<std::size_t>& actions() const noexcept { return actions_; }
  const std::vector<double>& rewards() const noexcept { return rewards_; }

 private:
  std::vector<State> states_;
  std::vector<std::size_t> actions_;
  std::vector<double> rewards_;
};

using Trajectory = BasicTrajectory<std::size_t>;

}  // namespace bayesrl
