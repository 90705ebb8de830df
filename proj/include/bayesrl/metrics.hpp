#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bayesrl/agents.hpp"
#include "bayesrl/environments.hpp"
#include "bayesrl/policy.hpp"
#include "bayesrl/trajectory.hpp"

namespace bayesrl {

/// Squared Hellinger distance sum_x (sqrt p(x) - sqrt q(x))^2, in [0, 2].
/// Throws DomainError if the supports differ in size or either argument is
/// not a probability vector (tolerance 1e-9).
double hellinger_sq(std::span<const double> p, std::span<const double> q);

/// 1 / (|S| |A|) on every (s, a) pair.
std::vector<double> uniform_weights(const ParametricMdp& family);

/// sqrt(sum_{s,a} mu(s,a) h^2(p_theta(.|s,a), p_theta'(.|s,a))), with weights
/// indexed [s * n_actions + a]. Throws DomainError for a negative weight.
double d_mu(const ParametricMdp& family, std::span<const double> theta,
            std::span<const double> theta_prime, std::span<const double> weights);

struct RegretQuantities {
  double v_error;  // |V_theta(pi*_theta) - V_theta0(pi*_theta0)| at s_eval
  double regret;   // |V_theta0(pi*_theta) - V_theta0(pi*_theta0)| at s_eval
};

RegretQuantities regret_quantities(const ParametricMdp& family, std::span<const double> theta,
                                   std::span<const double> theta0, std::size_t s_eval);

/// regret_quantities for grid cells, with plans taken from a shared cache and
/// true-model evaluations memoized per policy.
class RegretEvaluator {
 public:
  RegretEvaluator(std::shared_ptr<PlanCache> plans, std::span<const double> theta0,
                  std::size_t s_eval);

  RegretQuantities evaluate(std::size_t cell);
  const Policy& optimal_policy() const noexcept { return truth_.policy; }
  std::size_t s_eval() const noexcept { return s_eval_; }

 private:
  double true_value(const Policy& policy);

  std::shared_ptr<PlanCache> plans_;
  FiniteMdpModel true_model_;
  PlanResult truth_;
  std::size_t s_eval_;
  double optimal_value_;
  std::map<std::vector<std::size_t>, double> evaluated_;
};

/// Fraction of steps whose action agrees with pi_star_0 at the visited state.
/// Returns 0 for an empty trajectory. Throws StateError if pi_star_0 is
/// stochastic.
double optimal_action_proportion(const Trajectory& traj, const Policy& pi_star_0);

double param_l2_error(std::span<const double> theta, std::span<const double> theta0);

/// Per-step values of one metric in one run.
struct MetricSeries {
  std::string scenario;
  std::string agent;
  std::string name;
  std::size_t run_id = 0;
  std::vector<std::size_t> times;
  std::vector<double> values;

  /// Throws DomainError unless t exceeds the last recorded time.
  void push(std::size_t t, double value);
  std::size_t size() const noexcept { return times.size(); }
};

/// OLS slope of log(value) on log(t) over points with t >= t_min. Throws
/// DomainError on a non-positive value in range or fewer than two points.
double loglog_slope(std::span<const std::size_t> times, std::span<const double> values,
                    std::size_t t_min);
double loglog_slope(const MetricSeries& series, std::size_t t_min);

/// Mean and standard error (sample s.d. / sqrt n) of per-run scalars. With a
/// single run the standard error is 0 and `single_run` is set.
struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  bool single_run = false;
};

MeanStderr mean_stderr(std::span<const double> values);

}  // namespace bayesrl
