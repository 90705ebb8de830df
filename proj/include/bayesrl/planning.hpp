#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bayesrl/mdp.hpp"
#include "bayesrl/policy.hpp"

namespace bayesrl {

inline constexpr double kDefaultPlanTolerance = 1e-10;
inline constexpr std::size_t kDefaultPlanMaxIters = 100000;

struct PlanResult {
  std::vector<double> values;
  QTable q;
  Policy policy;  // greedy on q, lowest index on ties
  std::size_t iterations;
  double residual;  // sup-norm Bellman residual of `values`
};

/// Q(s, a) = R(s, a) + gamma * sum_s' P(s'|s, a) V(s').
QTable q_from_values(const FiniteMdpModel& model, std::span<const double> values);

/// (TV)(s) = max_a Q(s, a).
std::vector<double> bellman_backup(const FiniteMdpModel& model, std::span<const double> values);

/// Synchronous value iteration from V = 0 until successive iterates differ by
/// at most tol in sup-norm; the returned residual ||TV - V|| is then at most
/// gamma * tol. Throws ConvergenceError after max_iters sweeps.
PlanResult value_iteration(const FiniteMdpModel& model, double tol = kDefaultPlanTolerance,
                           std::size_t max_iters = kDefaultPlanMaxIters);

/// V^pi for a stationary policy. Direct LU solve of (I - gamma P_pi) V = R_pi
/// up to 1000 states, successive approximation beyond. Throws NumericalError
/// if the solution's Bellman residual exceeds tol.
std::vector<double> policy_evaluation(const FiniteMdpModel& model, const Policy& policy,
                                      double tol = kDefaultPlanTolerance);

}  // namespace bayesrl
