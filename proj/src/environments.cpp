#include "bayesrl/environments.hpp"

#include <string>

#include "bayesrl/errors.hpp"

namespace bayesrl {
namespace {

void check_theta(double theta, const char* name) {
  if (!(theta >= kThetaLower && theta <= kThetaUpper))
    throw DomainError(std::string(name) + " = " + std::to_string(theta) +
                      " outside [0.01, 0.99]");
}

}  // namespace

std::string_view env_name(EnvKind kind) { return kind == EnvKind::toy ? "toy" : "riverswim"; }

ToyParams::ToyParams(double t1, double t2) : theta1(t1), theta2(t2) {
  check_theta(theta1, "theta1");
  check_theta(theta2, "theta2");
}

RiverSwimParams::RiverSwimParams(double t) : theta(t) { check_theta(theta, "theta"); }

ParametricMdp::ParametricMdp(EnvKind kind, std::size_t n_states, std::size_t n_actions,
                             std::size_t n_params, std::vector<TransitionRole> roles,
                             std::vector<double> reward, double discount)
    : kind_(kind),
      n_states_(n_states),
      n_actions_(n_actions),
      n_params_(n_params),
      roles_(std::move(roles)),
      reward_(std::move(reward)),
      discount_(discount) {
  if (roles_.size() != n_states_ * n_actions_ || reward_.size() != n_states_ * n_actions_)
    throw DomainError("ParametricMdp: table sizes do not match state/action counts");
  for (const auto& r : roles_) {
    if (r.param && *r.param >= n_params_) throw DomainError("ParametricMdp: bad parameter index");
    if (r.success_state >= n_states_ || r.failure_state >= n_states_)
      throw DomainError("ParametricMdp: bad target state");
  }
}

const TransitionRole& ParametricMdp::role(std::size_t s, std::size_t a) const {
  if (s >= n_states_ || a >= n_actions_) throw IndexError("ParametricMdp: index out of range");
  return roles_[s * n_actions_ + a];
}

FiniteMdpModel ParametricMdp::model(std::span<const double> theta) const {
  if (theta.size() != n_params_) throw DomainError("ParametricMdp: wrong parameter dimension");
  for (double t : theta) check_theta(t, "theta");
  std::vector<double> p(n_states_ * n_actions_ * n_states_, 0.0);
  for (std::size_t s = 0; s < n_states_; ++s) {
    for (std::size_t a = 0; a < n_actions_; ++a) {
      const auto& r = roles_[s * n_actions_ + a];
      double* row = p.data() + (s * n_actions_ + a) * n_states_;
      if (r.param) {
        row[r.success_state] += theta[*r.param];
        row[r.failure_state] += 1.0 - theta[*r.param];
      } else {
        row[r.success_state] = 1.0;
      }
    }
  }
  return FiniteMdpModel(n_states_, n_actions_, std::move(p), reward_, discount_);
}

std::optional<CountUpdate> ParametricMdp::classify(std::size_t s, std::size_t a,
                                                   std::size_t next) const {
  const auto& r = role(s, a);
  if (!r.param) {
    if (next != r.success_state) throw DomainError("ParametricMdp: impossible transition");
    return std::nullopt;
  }
  if (next == r.success_state) return CountUpdate{*r.param, true};
  if (next == r.failure_state) return CountUpdate{*r.param, false};
  throw DomainError("ParametricMdp: impossible transition");
}

ParametricMdp toy_family(double gamma) {
  // index = s * 2 + a; theta1 drives state 1, theta2 drives state 0.
  std::vector<TransitionRole> roles{
      {1, 0, 1},  // s=0, a=0: next 0 w.p. theta2
      {1, 1, 0},  // s=0, a=1: next 1 w.p. theta2
      {0, 0, 1},  // s=1, a=0: next 0 w.p. theta1
      {0, 1, 0},  // s=1, a=1: next 1 w.p. theta1
  };
  std::vector<double> reward{2.0, 1.5, 0.5, 1.0};
  return ParametricMdp(EnvKind::toy, 2, 2, 2, std::move(roles), std::move(reward), gamma);
}

ParametricMdp riverswim_family(double gamma) {
  using namespace riverswim;
  std::vector<TransitionRole> roles(kStates * 2);
  std::vector<double> reward(kStates * 2, 0.0);
  for (std::size_t s = 0; s < kStates; ++s) {
    roles[s * 2 + kLeft] = {std::nullopt, s == 0 ? 0 : s - 1, 0};
    if (s + 1 < kStates)
      roles[s * 2 + kRight] = {0, s + 1, s};
    else
      roles[s * 2 + kRight] = {std::nullopt, s, 0};
  }
  reward[0 * 2 + kLeft] = 2.0;
  reward[(kStates - 1) * 2 + kRight] = 10.0;
  return ParametricMdp(EnvKind::riverswim, kStates, 2, 1, std::move(roles), std::move(reward),
                       gamma);
}

FiniteMdpModel toy_model(const ToyParams& params, double gamma) {
  const auto theta = params.vector();
  return toy_family(gamma).model(theta);
}

FiniteMdpModel riverswim_model(const RiverSwimParams& params, double gamma) {
  const auto theta = params.vector();
  return riverswim_family(gamma).model(theta);
}

}  // namespace bayesrl
