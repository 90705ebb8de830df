#include "bayesrl/policy.hpp"

#include <cmath>
#include <string>

#include "bayesrl/errors.hpp"
#include "bayesrl/mdp.hpp"

namespace bayesrl {

QTable::QTable(std::size_t n_states, std::size_t n_actions, double discount)
    : QTable(n_states, n_actions, std::vector<double>(n_states * n_actions, 0.0), discount) {}

QTable::QTable(std::size_t n_states, std::size_t n_actions, std::vector<double> values,
               double discount)
    : n_states_(n_states), n_actions_(n_actions), values_(std::move(values)), discount_(discount) {
  if (values_.size() != n_states_ * n_actions_) throw DomainError("QTable: wrong value count");
  for (double v : values_)
    if (!std::isfinite(v)) throw NumericalError("QTable: non-finite entry");
}

std::span<const double> QTable::row(std::size_t s) const {
  if (s >= n_states_) throw IndexError("QTable: state " + std::to_string(s) + " out of range");
  return std::span<const double>(values_).subspan(s * n_actions_, n_actions_);
}

std::size_t QTable::greedy_action(std::size_t s) const { return argmax_lowest(row(s)); }

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

Policy Policy::deterministic(std::vector<std::size_t> actions, std::size_t n_actions) {
  for (std::size_t a : actions)
    if (a >= n_actions) throw DomainError("Policy: action out of range");
  return Policy(Deterministic{std::move(actions), n_actions});
}

Policy Policy::stochastic(std::vector<std::vector<double>> probs) {
  if (probs.empty()) throw DomainError("Policy: empty table");
  const std::size_t n_actions = probs.front().size();
  for (const auto& row : probs) {
    if (row.size() != n_actions || n_actions == 0) throw DomainError("Policy: ragged table");
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw DomainError("Policy: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("Policy: row does not sum to 1");
  }
  return Policy(Stochastic{std::move(probs)});
}

Policy Policy::uniform(std::size_t n_states, std::size_t n_actions) {
  return stochastic(std::vector<std::vector<double>>(
      n_states, std::vector<double>(n_actions, 1.0 / static_cast<double>(n_actions))));
}

Policy Policy::q_greedy(QTable q) { return Policy(QGreedy{std::move(q)}); }

std::size_t Policy::n_states() const {
  return std::visit(
      [](const auto& r) -> std::size_t {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Deterministic>) return r.actions.size();
        else if constexpr (std::is_same_v<T, Stochastic>) return r.probs.size();
        else return r.q.n_states();
      },
      rep_);
}

std::size_t Policy::n_actions() const {
  return std::visit(
      [](const auto& r) -> std::size_t {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Deterministic>) return r.n_actions;
        else if constexpr (std::is_same_v<T, Stochastic>) return r.probs.front().size();
        else return r.q.n_actions();
      },
      rep_);
}

void Policy::check_state(std::size_t s) const {
  if (s >= n_states())
    throw DomainError("Policy: state " + std::to_string(s) + " outside policy domain");
}

std::size_t Policy::action(std::size_t s, RngStream& rng) const {
  check_state(s);
  if (const auto* st = std::get_if<Stochastic>(&rep_))
    return sample_discrete(st->probs[s], rng.uniform());
  return action(s);
}

std::size_t Policy::action(std::size_t s) const {
  check_state(s);
  if (const auto* d = std::get_if<Deterministic>(&rep_)) return d->actions[s];
  if (const auto* g = std::get_if<QGreedy>(&rep_)) return g->q.greedy_action(s);
  throw StateError("Policy: stochastic policy needs a random stream");
}

std::vector<double> Policy::distribution(std::size_t s) const {
  check_state(s);
  if (const auto* st = std::get_if<Stochastic>(&rep_)) return st->probs[s];
  std::vector<double> out(n_actions(), 0.0);
  out[action(s)] = 1.0;
  return out;
}

}  // namespace bayesrl
