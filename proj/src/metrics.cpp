#include "bayesrl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayesrl/errors.hpp"
#include "bayesrl/kernels.hpp"
#include "bayesrl/planning.hpp"

namespace bayesrl {
namespace {

void check_distribution(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DomainError(std::string(what) + ": negative or NaN probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError(std::string(what) + ": probabilities do not sum to 1");
}

}  // namespace

double hellinger_sq(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("hellinger_sq: supports differ");
  check_distribution(p, "hellinger_sq");
  check_distribution(q, "hellinger_sq");
  return std::clamp(kernels::hellinger_sq(p, q), 0.0, 2.0);
}

std::vector<double> uniform_weights(const ParametricMdp& family) {
  const std::size_t pairs = family.n_states() * family.n_actions();
  return std::vector<double>(pairs, 1.0 / static_cast<double>(pairs));
}

double d_mu(const ParametricMdp& family, std::span<const double> theta,
            std::span<const double> theta_prime, std::span<const double> weights) {
  const std::size_t n_a = family.n_actions();
  if (weights.size() != family.n_states() * n_a) throw DomainError("d_mu: weight count mismatch");
  for (double w : weights)
    if (!(w >= 0.0)) throw DomainError("d_mu: negative weight");
  const FiniteMdpModel m = family.model(theta);
  const FiniteMdpModel m2 = family.model(theta_prime);
  double acc = 0.0;
  for (std::size_t s = 0; s < family.n_states(); ++s)
    for (std::size_t a = 0; a < n_a; ++a) {
      const double w = weights[s * n_a + a];
      if (w == 0.0) continue;
      acc += w * hellinger_sq(m.next_distribution(s, a), m2.next_distribution(s, a));
    }
  return std::sqrt(acc);
}

RegretQuantities regret_quantities(const ParametricMdp& family, std::span<const double> theta,
                                   std::span<const double> theta0, std::size_t s_eval) {
  if (s_eval >= family.n_states()) throw IndexError("regret_quantities: s_eval out of range");
  const FiniteMdpModel truth = family.model(theta0);
  const PlanResult plan0 = value_iteration(truth);
  const PlanResult plan = value_iteration(family.model(theta));
  const double v0 = policy_evaluation(truth, plan0.policy)[s_eval];
  const double v_true_under_sample = policy_evaluation(truth, plan.policy)[s_eval];
  return {std::abs(plan.values[s_eval] - plan0.values[s_eval]), std::abs(v_true_under_sample - v0)};
}

RegretEvaluator::RegretEvaluator(std::shared_ptr<PlanCache> plans, std::span<const double> theta0,
                                 std::size_t s_eval)
    : plans_(std::move(plans)),
      true_model_(plans_->family().model(theta0)),
      truth_(value_iteration(true_model_)),
      s_eval_(s_eval),
      optimal_value_(0.0) {
  if (s_eval_ >= true_model_.n_states()) throw IndexError("RegretEvaluator: s_eval out of range");
  optimal_value_ = true_value(truth_.policy);
}

double RegretEvaluator::true_value(const Policy& policy) {
  std::vector<std::size_t> key(true_model_.n_states());
  for (std::size_t s = 0; s < key.size(); ++s) key[s] = policy.action(s);
  auto it = evaluated_.find(key);
  if (it != evaluated_.end()) return it->second;
  const double v = policy_evaluation(true_model_, policy)[s_eval_];
  evaluated_.emplace(std::move(key), v);
  return v;
}

RegretQuantities RegretEvaluator::evaluate(std::size_t cell) {
  const PlanResult& plan = plans_->plan(cell);
  return {std::abs(plan.values[s_eval_] - truth_.values[s_eval_]),
          std::abs(true_value(plan.policy) - optimal_value_)};
}

double optimal_action_proportion(const Trajectory& traj, const Policy& pi_star_0) {
  if (!pi_star_0.is_deterministic())
    throw StateError("optimal_action_proportion: reference policy must be deterministic");
  const auto& actions = traj.actions();
  if (actions.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < actions.size(); ++t)
    if (actions[t] == pi_star_0.action(traj.states()[t])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(actions.size());
}

double param_l2_error(std::span<const double> theta, std::span<const double> theta0) {
  if (theta.size() != theta0.size()) throw DomainError("param_l2_error: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) acc += (theta[i] - theta0[i]) * (theta[i] - theta0[i]);
  return std::sqrt(acc);
}

void MetricSeries::push(std::size_t t, double value) {
  if (!times.empty() && t <= times.back()) throw DomainError("MetricSeries: times must increase");
  times.push_back(t);
  values.push_back(value);
}

double loglog_slope(std::span<const std::size_t> times, std::span<const double> values,
                    std::size_t t_min) {
  if (times.size() != values.size()) throw DomainError("loglog_slope: length mismatch");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min) continue;
    if (times[i] == 0) throw DomainError("loglog_slope: time 0 has no logarithm");
    if (!(values[i] > 0.0)) throw DomainError("loglog_slope: non-positive value");
    const double x = std::log(static_cast<double>(times[i]));
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw DomainError("loglog_slope: need at least two points");
  const double dn = static_cast<double>(n);
  const double denom = sxx - sx * sx / dn;
  if (!(denom > 0.0)) throw DomainError("loglog_slope: times are not distinct");
  return (sxy - sx * sy / dn) / denom;
}

double loglog_slope(const MetricSeries& series, std::size_t t_min) {
  return loglog_slope(series.times, series.values, t_min);
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  out.n = values.size();
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
  if (out.n == 1) {
    out.single_run = true;
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stderr_ = std::sqrt(ss / static_cast<double>(out.n - 1)) / std::sqrt(static_cast<double>(out.n));
  return out;
}

}  // namespace bayesrl
