#include "bayesrl/fqi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bayesrl/errors.hpp"

namespace bayesrl {

FittedQ::FittedQ(std::vector<std::shared_ptr<const Regressor>> per_action, std::size_t n_iterations)
    : per_action_(std::move(per_action)), n_iterations_(n_iterations) {
  if (per_action_.empty()) throw DomainError("FittedQ: no actions");
  if (n_iterations_ == 0) throw DomainError("FittedQ: n_iterations must be at least 1");
}

double FittedQ::value(std::span<const double> state, std::size_t action) const {
  if (action >= per_action_.size()) throw IndexError("FittedQ::value: action out of range");
  const auto& reg = per_action_[action];
  if (!reg) return -std::numeric_limits<double>::infinity();
  return reg->predict(state);
}

std::size_t FittedQ::act(std::span<const double> state) const {
  std::size_t best = 0;
  double best_value = value(state, 0);
  for (std::size_t a = 1; a < per_action_.size(); ++a) {
    const double v = value(state, a);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

FittedQ fitted_q_iteration(std::span<const TransitionTuple> data, const FqiConfig& config,
                           const RngStream& rng) {
  if (data.empty()) throw DomainError("fitted_q_iteration: empty dataset");
  if (config.n_iterations == 0) throw DomainError("fitted_q_iteration: n_iterations must be >= 1");
  if (!(config.gamma >= 0.0 && config.gamma < 1.0))
    throw DomainError("fitted_q_iteration: gamma must lie in [0, 1)");
  if (config.n_actions == 0) throw DomainError("fitted_q_iteration: no actions");

  const std::size_t dim = data.front().state.size();
  std::vector<std::vector<std::size_t>> by_action(config.n_actions);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& t = data[i];
    if (t.action >= config.n_actions) throw DomainError("fitted_q_iteration: action out of range");
    if (t.state.size() != dim || t.next_state.size() != dim)
      throw DomainError("fitted_q_iteration: inconsistent feature dimension");
    if (!std::isfinite(t.reward)) throw DomainError("fitted_q_iteration: non-finite reward");
    by_action[t.action].push_back(i);
  }

  std::vector<FeatureMatrix> inputs(config.n_actions);
  for (std::size_t a = 0; a < config.n_actions; ++a) {
    inputs[a] = FeatureMatrix(by_action[a].size(), dim);
    for (std::size_t r = 0; r < by_action[a].size(); ++r)
      std::copy(data[by_action[a][r]].state.begin(), data[by_action[a][r]].state.end(),
                inputs[a].row(r).begin());
  }

  std::vector<double> next_max(data.size(), 0.0);
  std::vector<std::shared_ptr<const Regressor>> current(config.n_actions);
  for (std::size_t k = 0; k < config.n_iterations; ++k) {
    std::vector<std::shared_ptr<const Regressor>> fitted(config.n_actions);
    for (std::size_t a = 0; a < config.n_actions; ++a) {
      if (by_action[a].empty()) continue;
      std::vector<double> targets(by_action[a].size());
      for (std::size_t r = 0; r < targets.size(); ++r) {
        const std::size_t i = by_action[a][r];
        const double y = data[i].reward + config.gamma * next_max[i];
        targets[r] = std::clamp(y, -config.target_clip, config.target_clip);
      }
      fitted[a] = fit_regressor(inputs[a], targets, config.regressor, rng.substream(a));
    }
    current = std::move(fitted);
    if (k + 1 == config.n_iterations || config.gamma == 0.0) continue;
    FittedQ q(current, k + 1);
    for (std::size_t i = 0; i < data.size(); ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < config.n_actions; ++a)
        best = std::max(best, q.value(data[i].next_state, a));
      next_max[i] = best;
    }
  }
  return FittedQ(std::move(current), config.n_iterations);
}

std::size_t fitted_q_act(const FittedQ& q, std::span<const double> state) { return q.act(state); }

int fitted_q_act(const FittedQ& q, const GlucoseState& s) {
  const auto f = s.features();
  return static_cast<int>(q.act(f));
}

TransitionTuple glucose_tuple(const GlucoseState& s, int action, double reward,
                              const GlucoseState& next) {
  const auto f = s.features();
  const auto g = next.features();
  return {std::vector<double>(f.begin(), f.end()), static_cast<std::size_t>(action), reward,
          std::vector<double>(g.begin(), g.end())};
}

std::vector<TransitionTuple> simulate_dataset(const GlucoseParams& dynamics,
                                              const DatasetConfig& config, RngStream& rng) {
  if (config.n_tuples == 0) throw DomainError("simulate_dataset: n_tuples must be >= 1");
  if (config.episode_length == 0) throw DomainError("simulate_dataset: episode_length must be >= 1");
  if (!(config.action_probability >= 0.0 && config.action_probability <= 1.0))
    throw DomainError("simulate_dataset: action probability outside [0, 1]");
  dynamics.validate();

  std::vector<TransitionTuple> out;
  out.reserve(config.n_tuples);
  GlucoseState s = glucose_initial_state(dynamics, rng);
  std::size_t step = 0;
  while (out.size() < config.n_tuples) {
    if (step == config.episode_length) {
      s = glucose_initial_state(dynamics, rng);
      step = 0;
    }
    const int a = rng.bernoulli(config.action_probability) ? 1 : 0;
    const GlucoseStep r = glucose_step(dynamics, s, a, rng);
    out.push_back(glucose_tuple(s, a, r.reward, r.next));
    s = r.next;
    ++step;
  }
  return out;
}

}  // namespace bayesrl
