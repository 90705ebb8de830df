#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bayesrl/environments.hpp"
#include "bayesrl/fqi.hpp"
#include "bayesrl/gaussian_posterior.hpp"
#include "bayesrl/glucose.hpp"
#include "bayesrl/grid_posterior.hpp"
#include "bayesrl/planning.hpp"
#include "bayesrl/rng.hpp"

namespace bayesrl {

/// Exploration probability delta_t as a function of the step index t.
struct DeltaSchedule {
  enum class Kind { constant, inverse_t, power };
  Kind kind = Kind::inverse_t;
  double param = 0.0;

  static DeltaSchedule constant(double c);
  static DeltaSchedule inverse_t() { return {Kind::inverse_t, 0.0}; }
  static DeltaSchedule power(double p);
  /// Accepts "const:<c>", "inv_t" or "pow:<p>". Throws ConfigError.
  static DeltaSchedule parse(std::string_view text);

  /// c, min(1, 1/max(t,1)) or min(1, max(t,1)^p). Always in [0, 1].
  double operator()(std::size_t t) const;
  std::string label() const;
};

/// Optimal plans of sampled models, memoized by grid cell.
class PlanCache {
 public:
  PlanCache(ParametricMdp family, GridPosterior shape);

  const ParametricMdp& family() const noexcept { return family_; }
  std::vector<double> theta(std::size_t cell) const { return shape_.point(cell); }
  const PlanResult& plan(std::size_t cell);
  std::size_t size() const noexcept { return plans_.size(); }

 private:
  ParametricMdp family_;
  GridPosterior shape_;
  std::unordered_map<std::size_t, std::unique_ptr<PlanResult>> plans_;
};

/// Grid posterior kept current with the observed transitions. Recomputed
/// from the counts on first access after new data.
class GridBelief {
 public:
  GridBelief(const ParametricMdp& family, GridPosterior prior);

  void observe(std::size_t s, std::size_t a, std::size_t next);
  const GridPosterior& posterior();
  const SufficientCounts& counts() const noexcept { return counts_; }
  std::size_t sample_cell(RngStream& rng) { return posterior().sample_cell(rng); }

 private:
  ParametricMdp family_;
  GridPosterior prior_;
  GridPosterior current_;
  SufficientCounts counts_;
  bool dirty_ = false;
};

/// Per-run random streams of a finite-environment agent.
struct AgentStreams {
  RngStream explore;
  RngStream action;
  RngStream posterior;

  static AgentStreams for_run(std::uint64_t seed, std::uint64_t run_index);
};

/// Online agent on a parametric finite MDP. Call act() with the current
/// state and step index t = 0, 1, ..., then observe() the transition.
class FiniteAgent {
 public:
  FiniteAgent(const ParametricMdp& family, GridPosterior prior, std::shared_ptr<PlanCache> plans,
              AgentStreams streams);
  virtual ~FiniteAgent() = default;

  virtual std::string name() const = 0;

  std::size_t act(std::size_t s, std::size_t t);
  void observe(std::size_t s, std::size_t a, std::size_t next) { belief_.observe(s, a, next); }

  const GridPosterior& posterior() { return belief_.posterior(); }
  const SufficientCounts& counts() const noexcept { return belief_.counts(); }
  /// True if the last act() drew a new parameter.
  bool resampled_last() const noexcept { return resampled_last_; }
  bool explored_last() const noexcept { return explored_last_; }
  /// Cell of the parameter the cached plan was computed for.
  std::optional<std::size_t> sampled_cell() const noexcept { return cell_; }
  std::size_t resamples() const noexcept { return resamples_; }
  std::size_t explorations() const noexcept { return explorations_; }

 protected:
  virtual std::size_t decide(std::size_t s, std::size_t t) = 0;

  /// Draws a parameter from the posterior and caches its optimal plan.
  void resample();
  /// Action of the cached plan. Throws StateError before the first resample.
  std::size_t greedy(std::size_t s) const;
  std::size_t uniform_action();
  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  AgentStreams& streams() noexcept { return streams_; }

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  GridBelief belief_;
  std::shared_ptr<PlanCache> plans_;
  AgentStreams streams_;
  std::optional<std::size_t> cell_;
  const PlanResult* plan_ = nullptr;
  bool resampled_last_ = false;
  bool explored_last_ = false;
  std::size_t resamples_ = 0;
  std::size_t explorations_ = 0;
};

/// Draws u ~ U(0,1) from the explore stream; if u > delta_t resamples and
/// acts greedily, otherwise plays a uniform action.
class EpsilonGreedyTs final : public FiniteAgent {
 public:
  EpsilonGreedyTs(const ParametricMdp& family, GridPosterior prior,
                  std::shared_ptr<PlanCache> plans, AgentStreams streams, DeltaSchedule schedule);
  std::string name() const override { return "ets:" + schedule_.label(); }

 private:
  std::size_t decide(std::size_t s, std::size_t t) override;
  DeltaSchedule schedule_;
};

/// Resamples at 1-based times 1, 2, 4, 8, ...
class DsPsrl final : public FiniteAgent {
 public:
  using FiniteAgent::FiniteAgent;
  std::string name() const override { return "dspsrl"; }
  static bool resample_at(std::size_t time);

 private:
  std::size_t decide(std::size_t s, std::size_t t) override;
};

/// Resamples at t = 0 and whenever the state returns to the reference state.
class Tsmdp final : public FiniteAgent {
 public:
  Tsmdp(const ParametricMdp& family, GridPosterior prior, std::shared_ptr<PlanCache> plans,
        AgentStreams streams, std::size_t reference_state);
  std::string name() const override { return "tsmdp"; }

 private:
  std::size_t decide(std::size_t s, std::size_t t) override;
  std::size_t reference_state_;
};

/// Dynamic episodes: a new episode starts when the current one is longer
/// than the previous one, or when some (s, a) visit count has more than
/// doubled since the episode began (a first visit counts as doubling).
class Tsde final : public FiniteAgent {
 public:
  using FiniteAgent::FiniteAgent;
  std::string name() const override { return "tsde"; }
  const std::vector<std::size_t>& episode_lengths() const noexcept { return lengths_; }

 private:
  std::size_t decide(std::size_t s, std::size_t t) override;
  std::vector<std::uint64_t> visits_;
  std::vector<std::uint64_t> visits_at_start_;
  std::size_t episode_start_ = 0;
  std::size_t previous_length_ = 0;
  std::vector<std::size_t> lengths_;
};

/// Uniform actions; the posterior is still updated.
class UniformAgent final : public FiniteAgent {
 public:
  using FiniteAgent::FiniteAgent;
  std::string name() const override { return "uniform"; }

 private:
  std::size_t decide(std::size_t s, std::size_t t) override;
};

/// Uniform draw over n_actions from rng.
std::size_t uniform_agent_step(std::size_t n_actions, RngStream& rng);

enum class AgentKind { ets, dspsrl, tsmdp, tsde, uniform, gold, naive_fqi };

std::string_view agent_kind_name(AgentKind kind);
/// Throws ConfigError for unknown names.
AgentKind parse_agent_kind(std::string_view name);

struct FiniteAgentOptions {
  DeltaSchedule schedule;
  std::size_t reference_state = 0;
};

/// Throws ConfigError for gold / naive_fqi, which are glucose-only.
std::unique_ptr<FiniteAgent> make_finite_agent(AgentKind kind, const ParametricMdp& family,
                                               GridPosterior prior,
                                               std::shared_ptr<PlanCache> plans,
                                               AgentStreams streams,
                                               const FiniteAgentOptions& options);

// ---------------------------------------------------------------------------
// Glucose cohort agents. All patients share one posterior and one plan per
// time step; actions are chosen per patient.

struct CohortConfig {
  FqiConfig fqi;
  DatasetConfig dataset;
  DeltaSchedule schedule = DeltaSchedule::constant(0.05);
  double prior_variance = 0.25;
  /// naive_fqi plays uniformly until the history holds this many tuples.
  std::size_t naive_min_tuples = 50;
};

struct CohortStreams {
  RngStream explore;
  RngStream action;
  RngStream posterior;
  RngStream planner;

  static CohortStreams for_run(std::uint64_t seed, std::uint64_t run_index);
};

class CohortAgent {
 public:
  CohortAgent(GlucoseParams model, CohortConfig config, CohortStreams streams);
  virtual ~CohortAgent() = default;

  virtual std::string name() const = 0;
  /// One action per patient at step t.
  virtual std::vector<int> act(std::span<const GlucoseState> states, std::size_t t) = 0;
  virtual void observe(std::span<const GlucoseState> states, std::span<const int> actions,
                       std::span<const GlucoseStep> outcomes);

  std::size_t fits() const noexcept { return fits_; }
  std::size_t explorations() const noexcept { return explorations_; }

 protected:
  /// FQI on data simulated from the given dynamics.
  void plan_under(const GlucoseParams& dynamics);
  void plan_on(std::span<const TransitionTuple> data);
  int greedy(const GlucoseState& s) const;
  int uniform_action();

  const GlucoseParams& model() const noexcept { return model_; }
  const CohortConfig& config() const noexcept { return config_; }
  CohortStreams& streams() noexcept { return streams_; }
  bool has_plan() const noexcept { return plan_.has_value(); }
  void count_exploration() noexcept { ++explorations_; }

 private:
  GlucoseParams model_;
  CohortConfig config_;
  CohortStreams streams_;
  std::optional<FittedQ> plan_;
  std::size_t fits_ = 0;
  std::size_t explorations_ = 0;
};

/// Thompson sampling over beta with a conjugate Gaussian posterior. With
/// `doubling` the plan is refreshed at 1-based times 1, 2, 4, ...; otherwise
/// each patient explores w.p. delta_t and the plan is refreshed every step in
/// which some patient exploits.
class GlucoseThompson final : public CohortAgent {
 public:
  GlucoseThompson(GlucoseParams model, CohortConfig config, CohortStreams streams, bool doubling);

  std::string name() const override;
  std::vector<int> act(std::span<const GlucoseState> states, std::size_t t) override;
  void observe(std::span<const GlucoseState> states, std::span<const int> actions,
               std::span<const GlucoseStep> outcomes) override;
  GaussianPosterior posterior() const;
  const GlucoseCoefficients& last_sample() const noexcept { return last_sample_; }

 private:
  void resample();
  bool doubling_;
  RegressionStatistics stats_;
  GaussianPosterior prior_;
  GlucoseCoefficients last_sample_{};
};

/// FQI under the true coefficients, fitted once.
class GlucoseGold final : public CohortAgent {
 public:
  using CohortAgent::CohortAgent;
  std::string name() const override { return "gold"; }
  std::vector<int> act(std::span<const GlucoseState> states, std::size_t t) override;
};

/// Model-free FQI on the observed history, refitted every step.
class GlucoseNaiveFqi final : public CohortAgent {
 public:
  using CohortAgent::CohortAgent;
  std::string name() const override { return "naive_fqi"; }
  std::vector<int> act(std::span<const GlucoseState> states, std::size_t t) override;
  void observe(std::span<const GlucoseState> states, std::span<const int> actions,
               std::span<const GlucoseStep> outcomes) override;

 private:
  std::vector<TransitionTuple> history_;
};

class GlucoseUniform final : public CohortAgent {
 public:
  using CohortAgent::CohortAgent;
  std::string name() const override { return "uniform"; }
  std::vector<int> act(std::span<const GlucoseState> states, std::size_t t) override;
};

/// Throws ConfigError for tsmdp / tsde, which need a finite state space.
std::unique_ptr<CohortAgent> make_cohort_agent(AgentKind kind, GlucoseParams model,
                                               CohortConfig config, CohortStreams streams);

}  // namespace bayesrl
