#include "bayesrl/planning.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "bayesrl/errors.hpp"
#include "bayesrl/kernels.hpp"

namespace bayesrl {
namespace {

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

void check_size(const FiniteMdpModel& model, std::span<const double> values) {
  if (values.size() != model.n_states())
    throw DomainError("value vector length does not match the state count");
}

// (R_pi + gamma P_pi V)(s)
double policy_backup(const FiniteMdpModel& model, const std::vector<double>& dist,
                     std::size_t s, std::span<const double> values) {
  double v = 0.0;
  for (std::size_t a = 0; a < dist.size(); ++a) {
    if (dist[a] == 0.0) continue;
    v += dist[a] * (model.reward(s, a) +
                    model.discount() * kernels::dot(model.next_distribution(s, a), values));
  }
  return v;
}

}  // namespace

QTable q_from_values(const FiniteMdpModel& model, std::span<const double> values) {
  check_size(model, values);
  std::vector<double> q(model.n_states() * model.n_actions());
  for (std::size_t s = 0; s < model.n_states(); ++s)
    for (std::size_t a = 0; a < model.n_actions(); ++a)
      q[s * model.n_actions() + a] =
          model.reward(s, a) + model.discount() * kernels::dot(model.next_distribution(s, a), values);
  return QTable(model.n_states(), model.n_actions(), std::move(q), model.discount());
}

std::vector<double> bellman_backup(const FiniteMdpModel& model, std::span<const double> values) {
  const QTable q = q_from_values(model, values);
  std::vector<double> out(model.n_states());
  for (std::size_t s = 0; s < model.n_states(); ++s) {
    const auto row = q.row(s);
    out[s] = *std::max_element(row.begin(), row.end());
  }
  return out;
}

PlanResult value_iteration(const FiniteMdpModel& model, double tol, std::size_t max_iters) {
  if (!(tol > 0.0)) throw DomainError("value_iteration: tol must be positive");
  std::vector<double> v(model.n_states(), 0.0);
  std::size_t iter = 0;
  double delta = 0.0;
  while (true) {
    if (iter == max_iters)
      throw ConvergenceError("value_iteration: no convergence after " + std::to_string(iter) +
                                 " sweeps, residual " + std::to_string(delta),
                             delta);
    auto next = bellman_backup(model, v);
    delta = sup_distance(next, v);
    v = std::move(next);
    ++iter;
    if (delta <= tol) break;
  }
  QTable q = q_from_values(model, v);
  double residual = 0.0;
  std::vector<std::size_t> greedy(model.n_states());
  for (std::size_t s = 0; s < model.n_states(); ++s) {
    greedy[s] = q.greedy_action(s);
    residual = std::max(residual, std::abs(q(s, greedy[s]) - v[s]));
  }
  if (residual > tol)
    throw ConvergenceError("value_iteration: final Bellman residual above tolerance", residual);
  return PlanResult{std::move(v), std::move(q),
                    Policy::deterministic(std::move(greedy), model.n_actions()), iter, residual};
}

std::vector<double> policy_evaluation(const FiniteMdpModel& model, const Policy& policy,
                                      double tol) {
  const std::size_t n = model.n_states();
  if (policy.n_states() != n || policy.n_actions() != model.n_actions())
    throw DomainError("policy_evaluation: policy does not match the model's spaces");
  std::vector<std::vector<double>> dist(n);
  for (std::size_t s = 0; s < n; ++s) dist[s] = policy.distribution(s);

  std::vector<double> v(n, 0.0);
  if (n <= 1000) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t act = 0; act < model.n_actions(); ++act) {
        const double w = dist[s][act];
        if (w == 0.0) continue;
        b(s) += w * model.reward(s, act);
        const auto row = model.next_distribution(s, act);
        for (std::size_t sp = 0; sp < n; ++sp) a(s, sp) -= model.discount() * w * row[sp];
      }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd x = lu.solve(b);
    for (std::size_t s = 0; s < n; ++s) v[s] = x(s);
  } else {
    const double stop = tol * (1.0 - model.discount()) / model.discount();
    for (;;) {
      std::vector<double> next(n);
      for (std::size_t s = 0; s < n; ++s) next[s] = policy_backup(model, dist[s], s, v);
      const double d = sup_distance(next, v);
      v = std::move(next);
      if (d <= stop) break;
    }
  }
  double residual = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!std::isfinite(v[s])) throw NumericalError("policy_evaluation: non-finite value");
    residual = std::max(residual, std::abs(policy_backup(model, dist[s], s, v) - v[s]));
  }
  if (residual > tol)
    throw NumericalError("policy_evaluation: Bellman residual " + std::to_string(residual) +
                         " exceeds tolerance");
  return v;
}

}  // namespace bayesrl
