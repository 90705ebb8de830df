#include "bayesrl/agents.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "bayesrl/errors.hpp"

namespace bayesrl {

// ---------------------------------------------------------------------------
// DeltaSchedule

DeltaSchedule DeltaSchedule::constant(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("delta: constant must lie in [0, 1]");
  return {Kind::constant, c};
}

DeltaSchedule DeltaSchedule::power(double p) {
  if (!(p <= 0.0) || !std::isfinite(p)) throw ConfigError("delta: power exponent must be <= 0");
  return {Kind::power, p};
}

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(std::string(what) + ": cannot parse number '" + std::string(text) + "'");
  return value;
}

}  // namespace

DeltaSchedule DeltaSchedule::parse(std::string_view text) {
  if (text == "inv_t") return inverse_t();
  if (text.starts_with("const:")) return constant(parse_number(text.substr(6), "delta"));
  if (text.starts_with("pow:")) return power(parse_number(text.substr(4), "delta"));
  throw ConfigError("delta: expected const:<c>, inv_t or pow:<p>, got '" + std::string(text) + "'");
}

double DeltaSchedule::operator()(std::size_t t) const {
  const double tt = static_cast<double>(std::max<std::size_t>(t, 1));
  switch (kind) {
    case Kind::constant:
      return param;
    case Kind::inverse_t:
      return std::min(1.0, 1.0 / tt);
    case Kind::power:
      return std::min(1.0, std::pow(tt, param));
  }
  return 1.0;
}

std::string DeltaSchedule::label() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::constant:
      out << "const:" << param;
      break;
    case Kind::inverse_t:
      out << "inv_t";
      break;
    case Kind::power:
      out << "pow:" << param;
      break;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Plans and beliefs

PlanCache::PlanCache(ParametricMdp family, GridPosterior shape)
    : family_(std::move(family)), shape_(std::move(shape)) {
  if (shape_.dims() != family_.n_params())
    throw DomainError("PlanCache: grid dimension does not match the parameter count");
}

const PlanResult& PlanCache::plan(std::size_t cell) {
  auto it = plans_.find(cell);
  if (it != plans_.end()) return *it->second;
  if (cell >= shape_.size()) throw IndexError("PlanCache::plan: cell out of range");
  const auto theta = shape_.point(cell);
  auto result = std::make_unique<PlanResult>(value_iteration(family_.model(theta)));
  return *plans_.emplace(cell, std::move(result)).first->second;
}

GridBelief::GridBelief(const ParametricMdp& family, GridPosterior prior)
    : family_(family),
      prior_(std::move(prior)),
      current_(prior_.normalized()),
      counts_(family.n_params()) {
  if (prior_.dims() != family.n_params())
    throw DomainError("GridBelief: grid dimension does not match the parameter count");
}

void GridBelief::observe(std::size_t s, std::size_t a, std::size_t next) {
  if (const auto update = family_.classify(s, a, next)) {
    counts_.add(*update);
    dirty_ = true;
  }
}

const GridPosterior& GridBelief::posterior() {
  if (dirty_) {
    current_ = grid_update(prior_, counts_);
    dirty_ = false;
  }
  return current_;
}

AgentStreams AgentStreams::for_run(std::uint64_t seed, std::uint64_t run_index) {
  return {RngStream(seed, derive_stream_id(run_index, StreamPurpose::explore)),
          RngStream(seed, derive_stream_id(run_index, StreamPurpose::action)),
          RngStream(seed, derive_stream_id(run_index, StreamPurpose::posterior))};
}

// ---------------------------------------------------------------------------
// Finite agents

FiniteAgent::FiniteAgent(const ParametricMdp& family, GridPosterior prior,
                         std::shared_ptr<PlanCache> plans, AgentStreams streams)
    : n_states_(family.n_states()),
      n_actions_(family.n_actions()),
      belief_(family, std::move(prior)),
      plans_(std::move(plans)),
      streams_(std::move(streams)) {
  if (!plans_) throw DomainError("FiniteAgent: missing plan cache");
}

std::size_t FiniteAgent::act(std::size_t s, std::size_t t) {
  if (s >= n_states_) throw IndexError("FiniteAgent::act: state out of range");
  resampled_last_ = false;
  explored_last_ = false;
  return decide(s, t);
}

void FiniteAgent::resample() {
  const std::size_t cell = belief_.sample_cell(streams_.posterior);
  plan_ = &plans_->plan(cell);
  cell_ = cell;
  resampled_last_ = true;
  ++resamples_;
}

std::size_t FiniteAgent::greedy(std::size_t s) const {
  if (plan_ == nullptr) throw StateError("FiniteAgent: no plan has been sampled");
  return plan_->policy.action(s);
}

std::size_t FiniteAgent::uniform_action() {
  explored_last_ = true;
  ++explorations_;
  return uniform_agent_step(n_actions_, streams_.action);
}

EpsilonGreedyTs::EpsilonGreedyTs(const ParametricMdp& family, GridPosterior prior,
                                 std::shared_ptr<PlanCache> plans, AgentStreams streams,
                                 DeltaSchedule schedule)
    : FiniteAgent(family, std::move(prior), std::move(plans), std::move(streams)),
      schedule_(schedule) {}

std::size_t EpsilonGreedyTs::decide(std::size_t s, std::size_t t) {
  const double u = streams().explore.uniform();
  if (u > schedule_(t)) {
    resample();
    return greedy(s);
  }
  return uniform_action();
}

bool DsPsrl::resample_at(std::size_t time) { return time >= 1 && (time & (time - 1)) == 0; }

std::size_t DsPsrl::decide(std::size_t s, std::size_t t) {
  if (resample_at(t + 1)) resample();
  return greedy(s);
}

Tsmdp::Tsmdp(const ParametricMdp& family, GridPosterior prior, std::shared_ptr<PlanCache> plans,
             AgentStreams streams, std::size_t reference_state)
    : FiniteAgent(family, std::move(prior), std::move(plans), std::move(streams)),
      reference_state_(reference_state) {
  if (reference_state_ >= family.n_states()) throw DomainError("Tsmdp: reference state out of range");
}

std::size_t Tsmdp::decide(std::size_t s, std::size_t t) {
  if (t == 0 || s == reference_state_) resample();
  return greedy(s);
}

std::size_t Tsde::decide(std::size_t s, std::size_t t) {
  if (visits_.empty()) visits_.assign(n_states() * n_actions(), 0);
  bool new_episode = resamples() == 0;
  if (!new_episode && t - episode_start_ > previous_length_) new_episode = true;
  if (!new_episode) {
    for (std::size_t i = 0; i < visits_.size(); ++i) {
      if (visits_[i] > 2 * visits_at_start_[i]) {
        new_episode = true;
        break;
      }
    }
  }
  if (new_episode) {
    if (resamples() > 0) {
      previous_length_ = t - episode_start_;
      lengths_.push_back(previous_length_);
    }
    episode_start_ = t;
    visits_at_start_ = visits_;
    resample();
  }
  const std::size_t a = greedy(s);
  ++visits_[s * n_actions() + a];
  return a;
}

std::size_t UniformAgent::decide(std::size_t, std::size_t) { return uniform_action(); }

std::size_t uniform_agent_step(std::size_t n_actions, RngStream& rng) {
  if (n_actions == 0) throw DomainError("uniform_agent_step: no actions");
  return rng.uniform_index(n_actions);
}

std::string_view agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::ets: return "ets";
    case AgentKind::dspsrl: return "dspsrl";
    case AgentKind::tsmdp: return "tsmdp";
    case AgentKind::tsde: return "tsde";
    case AgentKind::uniform: return "uniform";
    case AgentKind::gold: return "gold";
    case AgentKind::naive_fqi: return "naive_fqi";
  }
  return "?";
}

AgentKind parse_agent_kind(std::string_view name) {
  for (auto kind : {AgentKind::ets, AgentKind::dspsrl, AgentKind::tsmdp, AgentKind::tsde,
                    AgentKind::uniform, AgentKind::gold, AgentKind::naive_fqi})
    if (agent_kind_name(kind) == name) return kind;
  throw ConfigError("unknown agent '" + std::string(name) + "'");
}

std::unique_ptr<FiniteAgent> make_finite_agent(AgentKind kind, const ParametricMdp& family,
                                               GridPosterior prior,
                                               std::shared_ptr<PlanCache> plans,
                                               AgentStreams streams,
                                               const FiniteAgentOptions& options) {
  switch (kind) {
    case AgentKind::ets:
      return std::make_unique<EpsilonGreedyTs>(family, std::move(prior), std::move(plans),
                                               std::move(streams), options.schedule);
    case AgentKind::dspsrl:
      return std::make_unique<DsPsrl>(family, std::move(prior), std::move(plans), std::move(streams));
    case AgentKind::tsmdp:
      return std::make_unique<Tsmdp>(family, std::move(prior), std::move(plans), std::move(streams),
                                     options.reference_state);
    case AgentKind::tsde:
      return std::make_unique<Tsde>(family, std::move(prior), std::move(plans), std::move(streams));
    case AgentKind::uniform:
      return std::make_unique<UniformAgent>(family, std::move(prior), std::move(plans),
                                            std::move(streams));
    case AgentKind::gold:
    case AgentKind::naive_fqi:
      break;
  }
  throw ConfigError("agent '" + std::string(agent_kind_name(kind)) +
                    "' is only available for the glucose scenario");
}

// ---------------------------------------------------------------------------
// Glucose cohort agents

CohortStreams CohortStreams::for_run(std::uint64_t seed, std::uint64_t run_index) {
  return {RngStream(seed, derive_stream_id(run_index, StreamPurpose::explore)),
          RngStream(seed, derive_stream_id(run_index, StreamPurpose::action)),
          RngStream(seed, derive_stream_id(run_index, StreamPurpose::posterior)),
          RngStream(seed, derive_stream_id(run_index, StreamPurpose::planner))};
}

CohortAgent::CohortAgent(GlucoseParams model, CohortConfig config, CohortStreams streams)
    : model_(std::move(model)), config_(std::move(config)), streams_(std::move(streams)) {
  model_.validate();
}

void CohortAgent::observe(std::span<const GlucoseState>, std::span<const int>,
                          std::span<const GlucoseStep>) {}

void CohortAgent::plan_under(const GlucoseParams& dynamics) {
  RngStream data_rng = streams_.planner.substream(2 * fits_);
  const auto data = simulate_dataset(dynamics, config_.dataset, data_rng);
  plan_on(data);
}

void CohortAgent::plan_on(std::span<const TransitionTuple> data) {
  plan_.emplace(fitted_q_iteration(data, config_.fqi, streams_.planner.substream(2 * fits_ + 1)));
  ++fits_;
}

int CohortAgent::greedy(const GlucoseState& s) const {
  if (!plan_) throw StateError("CohortAgent: no plan has been fitted");
  return fitted_q_act(*plan_, s);
}

int CohortAgent::uniform_action() {
  ++explorations_;
  return static_cast<int>(uniform_agent_step(config_.fqi.n_actions, streams_.action));
}

GlucoseThompson::GlucoseThompson(GlucoseParams model, CohortConfig config, CohortStreams streams,
                                 bool doubling)
    : CohortAgent(std::move(model), std::move(config), std::move(streams)),
      doubling_(doubling),
      stats_(kGlucoseCoefficients),
      prior_(GaussianPosterior::isotropic(kGlucoseCoefficients, this->config().prior_variance,
                                          this->model().sigma)) {}

std::string GlucoseThompson::name() const {
  return doubling_ ? "dspsrl" : "ets:" + config().schedule.label();
}

GaussianPosterior GlucoseThompson::posterior() const { return stats_.posterior(prior_); }

void GlucoseThompson::resample() {
  const Eigen::VectorXd beta = blr_sample(posterior(), streams().posterior);
  for (std::size_t i = 0; i < kGlucoseCoefficients; ++i)
    last_sample_[i] = beta[static_cast<Eigen::Index>(i)];
  plan_under(model().with_beta(last_sample_));
}

std::vector<int> GlucoseThompson::act(std::span<const GlucoseState> states, std::size_t t) {
  std::vector<int> actions(states.size(), 0);
  if (doubling_) {
    if (DsPsrl::resample_at(t + 1)) resample();
    for (std::size_t i = 0; i < states.size(); ++i) actions[i] = greedy(states[i]);
    return actions;
  }
  const double delta = config().schedule(t);
  std::vector<bool> exploit(states.size());
  bool any = false;
  for (std::size_t i = 0; i < states.size(); ++i) {
    exploit[i] = streams().explore.uniform() > delta;
    any = any || exploit[i];
  }
  if (any) resample();
  for (std::size_t i = 0; i < states.size(); ++i)
    actions[i] = exploit[i] ? greedy(states[i]) : uniform_action();
  return actions;
}

void GlucoseThompson::observe(std::span<const GlucoseState> states, std::span<const int> actions,
                              std::span<const GlucoseStep> outcomes) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto row = glucose_design_row(states[i], actions[i]);
    stats_.add(row, outcomes[i].next.gl);
  }
}

std::vector<int> GlucoseGold::act(std::span<const GlucoseState> states, std::size_t) {
  if (!has_plan()) plan_under(model());
  std::vector<int> actions(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) actions[i] = greedy(states[i]);
  return actions;
}

std::vector<int> GlucoseNaiveFqi::act(std::span<const GlucoseState> states, std::size_t) {
  std::vector<int> actions(states.size());
  if (history_.size() < config().naive_min_tuples) {
    for (auto& a : actions) a = uniform_action();
    return actions;
  }
  plan_on(history_);
  for (std::size_t i = 0; i < states.size(); ++i) actions[i] = greedy(states[i]);
  return actions;
}

void GlucoseNaiveFqi::observe(std::span<const GlucoseState> states, std::span<const int> actions,
                              std::span<const GlucoseStep> outcomes) {
  for (std::size_t i = 0; i < states.size(); ++i)
    history_.push_back(glucose_tuple(states[i], actions[i], outcomes[i].reward, outcomes[i].next));
}

std::vector<int> GlucoseUniform::act(std::span<const GlucoseState> states, std::size_t) {
  std::vector<int> actions(states.size());
  for (auto& a : actions) a = uniform_action();
  return actions;
}

std::unique_ptr<CohortAgent> make_cohort_agent(AgentKind kind, GlucoseParams model,
                                               CohortConfig config, CohortStreams streams) {
  switch (kind) {
    case AgentKind::ets:
      return std::make_unique<GlucoseThompson>(std::move(model), std::move(config),
                                               std::move(streams), false);
    case AgentKind::dspsrl:
      return std::make_unique<GlucoseThompson>(std::move(model), std::move(config),
                                               std::move(streams), true);
    case AgentKind::gold:
      return std::make_unique<GlucoseGold>(std::move(model), std::move(config), std::move(streams));
    case AgentKind::naive_fqi:
      return std::make_unique<GlucoseNaiveFqi>(std::move(model), std::move(config),
                                               std::move(streams));
    case AgentKind::uniform:
      return std::make_unique<GlucoseUniform>(std::move(model), std::move(config),
                                              std::move(streams));
    case AgentKind::tsmdp:
    case AgentKind::tsde:
      break;
  }
  throw ConfigError("agent '" + std::string(agent_kind_name(kind)) +
                    "' needs a finite state space and is not available for glucose");
}

}  // namespace bayesrl
