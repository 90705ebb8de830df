#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bayesrl/mdp.hpp"

namespace bayesrl {

inline constexpr double kThetaLower = 0.01;
inline constexpr double kThetaUpper = 0.99;

enum class EnvKind { toy, riverswim };

std::string_view env_name(EnvKind kind);

/// Two Bernoulli transition parameters of the two-state toy MDP.
struct ToyParams {
  double theta1;
  double theta2;

  /// Throws DomainError unless both parameters lie in [0.01, 0.99].
  ToyParams(double theta1, double theta2);
  std::vector<double> vector() const { return {theta1, theta2}; }
};

/// Success probability of a rightward swim.
struct RiverSwimParams {
  double theta;

  explicit RiverSwimParams(double theta);
  std::vector<double> vector() const { return {theta}; }
};

namespace riverswim {
inline constexpr std::size_t kStates = 6;
inline constexpr std::size_t kLeft = 0;
inline constexpr std::size_t kRight = 1;
/// External states are numbered 1..6; internally 0..5.
inline constexpr std::size_t internal_state(std::size_t external) { return external - 1; }
inline constexpr std::size_t external_state(std::size_t internal) { return internal + 1; }
}  // namespace riverswim

/// How one (s, a) row depends on the parameter vector: with a parameter
/// index k the next state is `success_state` w.p. theta[k] and
/// `failure_state` otherwise; without one the row is a point mass on
/// `success_state`.
struct TransitionRole {
  std::optional<std::size_t> param;
  std::size_t success_state = 0;
  std::size_t failure_state = 0;
};

/// Which Bernoulli counter an observed transition feeds.
struct CountUpdate {
  std::size_t param;
  bool success;
};

/// A finite MDP family indexed by a low-dimensional vector of Bernoulli
/// transition probabilities. Rewards and discount are known; only theta is
/// inferred.
class ParametricMdp {
 public:
  ParametricMdp(EnvKind kind, std::size_t n_states, std::size_t n_actions, std::size_t n_params,
                std::vector<TransitionRole> roles, std::vector<double> reward, double discount);

  EnvKind kind() const noexcept { return kind_; }
  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  std::size_t n_params() const noexcept { return n_params_; }
  double discount() const noexcept { return discount_; }
  const TransitionRole& role(std::size_t s, std::size_t a) const;

  /// Throws DomainError if theta has the wrong size or leaves [0.01, 0.99].
  FiniteMdpModel model(std::span<const double> theta) const;

  /// Counter fed by the transition (s, a) -> next; nullopt when the row does
  /// not depend on theta. Throws DomainError if `next` is impossible.
  std::optional<CountUpdate> classify(std::size_t s, std::size_t a, std::size_t next) const;

 private:
  EnvKind kind_;
  std::size_t n_states_;
  std::size_t n_actions_;
  std::size_t n_params_;
  std::vector<TransitionRole> roles_;
  std::vector<double> reward_;
  double discount_;
};

ParametricMdp toy_family(double gamma);
ParametricMdp riverswim_family(double gamma);

/// 2 states x 2 actions: P[1][1]=(1-t1, t1), P[1][0]=(t1, 1-t1),
/// P[0][1]=(1-t2, t2), P[0][0]=(t2, 1-t2); R = {{2, 1.5}, {0.5, 1}}.
FiniteMdpModel toy_model(const ToyParams& params, double gamma);

/// Six-state chain. Left always moves one state left (clamped at the first
/// state); right moves one state right w.p. theta and otherwise stays.
/// r(1, left) = 2, r(6, right) = 10.
FiniteMdpModel riverswim_model(const RiverSwimParams& params, double gamma);

}  // namespace bayesrl
