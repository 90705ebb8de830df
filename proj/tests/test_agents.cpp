#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "bayesrl/agents.hpp"
#include "bayesrl/environments.hpp"
#include "bayesrl/errors.hpp"
#include "bayesrl/planning.hpp"

using namespace bayesrl;

namespace {

struct Setup {
  ParametricMdp family;
  GridPosterior prior;
  std::shared_ptr<PlanCache> plans;
};

Setup riverswim_setup(bool point_mass, double theta0 = 0.9) {
  auto fam = riverswim_family(0.99);
  const std::vector<double> th{theta0};
  auto shape = GridPosterior::uniform(1, 128);
  auto prior = point_mass ? GridPosterior::point_mass(th, 128) : shape;
  return {fam, prior, std::make_shared<PlanCache>(fam, shape)};
}

Setup toy_setup(bool point_mass) {
  auto fam = toy_family(0.25);
  const std::vector<double> th{0.2, 0.4};
  auto shape = GridPosterior::uniform(2, 64);
  auto prior = point_mass ? GridPosterior::point_mass(th, 64) : shape;
  return {fam, prior, std::make_shared<PlanCache>(fam, shape)};
}

std::unique_ptr<FiniteAgent> make(AgentKind kind, const Setup& s, std::uint64_t seed,
                                  DeltaSchedule schedule = DeltaSchedule::inverse_t(),
                                  std::size_t reference = 0) {
  return make_finite_agent(kind, s.family, s.prior, s.plans, AgentStreams::for_run(seed, 0),
                           FiniteAgentOptions{schedule, reference});
}

// Runs `agent` for n steps on the true model; returns the actions.
std::vector<std::size_t> rollout(FiniteAgent& agent, const FiniteMdpModel& truth, std::size_t s0,
                                 std::size_t n, std::uint64_t env_seed,
                                 std::vector<std::size_t>* states = nullptr) {
  RngStream env(env_seed, 99);
  std::vector<std::size_t> actions;
  std::size_t s = s0;
  for (std::size_t t = 0; t < n; ++t) {
    if (states) states->push_back(s);
    const auto a = agent.act(s, t);
    const auto step = step_finite(truth, s, a, env);
    agent.observe(s, a, step.next_state);
    actions.push_back(a);
    s = step.next_state;
  }
  return actions;
}

}  // namespace

TEST(DeltaScheduleTest, Values) {
  const auto c = DeltaSchedule::constant(0.05);
  EXPECT_EQ(c(0), 0.05);
  EXPECT_EQ(c(1000), 0.05);
  const auto inv = DeltaSchedule::inverse_t();
  EXPECT_EQ(inv(0), 1.0);
  EXPECT_EQ(inv(1), 1.0);
  EXPECT_EQ(inv(4), 0.25);
  const auto pw = DeltaSchedule::power(-0.25);
  EXPECT_EQ(pw(0), 1.0);
  EXPECT_NEAR(pw(16), 0.5, 1e-15);
  for (std::size_t t : {0, 1, 2, 10, 100000}) {
    for (const auto& d : {c, inv, pw}) {
      EXPECT_GE(d(t), 0.0);
      EXPECT_LE(d(t), 1.0);
    }
  }
}

TEST(DeltaScheduleTest, ParseAndLabel) {
  EXPECT_EQ(DeltaSchedule::parse("const:0.05").label(), "const:0.05");
  EXPECT_EQ(DeltaSchedule::parse("inv_t").label(), "inv_t");
  EXPECT_EQ(DeltaSchedule::parse("pow:-0.25").label(), "pow:-0.25");
  for (const char* bad : {"", "const", "const:abc", "const:1.5", "const:-0.1", "pow:0.5", "inv", "sqrt"})
    EXPECT_THROW(DeltaSchedule::parse(bad), ConfigError) << bad;
}

TEST(EpsilonGreedy, FullExplorationIsUniform) {
  const auto s = riverswim_setup(false);
  auto agent = make(AgentKind::ets, s, 3, DeltaSchedule::constant(1.0));
  const auto actions = rollout(*agent, riverswim_model(RiverSwimParams(0.9), 0.99), 0, 10000, 3);
  double right = 0;
  for (auto a : actions) right += static_cast<double>(a);
  EXPECT_NEAR(right / 10000, 0.5, 0.02);
  EXPECT_EQ(agent->resamples(), 0u);
  EXPECT_EQ(agent->explorations(), 10000u);
}

TEST(EpsilonGreedy, NoExplorationWithPointMassFollowsOptimalPolicy) {
  for (bool toy : {true, false}) {
    const auto s = toy ? toy_setup(true) : riverswim_setup(true);
    const auto truth = toy ? toy_model(ToyParams(0.2, 0.4), 0.25) : riverswim_model(RiverSwimParams(0.9), 0.99);
    const auto pi = value_iteration(truth).policy;
    auto agent = make(AgentKind::ets, s, 4, DeltaSchedule::constant(0.0));
    std::vector<std::size_t> states;
    const auto actions = rollout(*agent, truth, 0, 2000, 4, &states);
    for (std::size_t t = 0; t < actions.size(); ++t) ASSERT_EQ(actions[t], pi.action(states[t]));
  }
}

TEST(EpsilonGreedy, ExplorationFrequencyAndResampleCount) {
  const auto s = riverswim_setup(false);
  auto agent = make(AgentKind::ets, s, 5, DeltaSchedule::constant(0.05));
  RngStream env(5, 99);
  std::size_t state = 0, explored = 0, resampled = 0;
  const auto truth = riverswim_model(RiverSwimParams(0.5), 0.99);
  for (std::size_t t = 0; t < 10000; ++t) {
    const auto a = agent->act(state, t);
    explored += agent->explored_last();
    resampled += agent->resampled_last();
    EXPECT_NE(agent->explored_last(), agent->resampled_last());
    const auto step = step_finite(truth, state, a, env);
    agent->observe(state, a, step.next_state);
    state = step.next_state;
  }
  EXPECT_NEAR(static_cast<double>(explored) / 10000, 0.05, 0.01);
  EXPECT_EQ(agent->resamples(), 10000 - explored);
  EXPECT_EQ(resampled, agent->resamples());
}

TEST(EpsilonGreedy, ExplorationIndicatorIndependentOfHistory) {
  // Same seed, different environments: the explore draws coincide.
  const auto a = riverswim_setup(false, 0.5);
  const auto b = toy_setup(false);
  auto x = make(AgentKind::ets, a, 6, DeltaSchedule::constant(0.3));
  auto y = make(AgentKind::ets, b, 6, DeltaSchedule::constant(0.3));
  RngStream ex(1, 1), ey(2, 2);
  std::size_t sx = 0, sy = 1;
  const auto mx = riverswim_model(RiverSwimParams(0.5), 0.99);
  const auto my = toy_model(ToyParams(0.7, 0.1), 0.25);
  for (std::size_t t = 0; t < 2000; ++t) {
    const auto ax = x->act(sx, t);
    const auto ay = y->act(sy, t);
    ASSERT_EQ(x->explored_last(), y->explored_last()) << t;
    const auto nx = step_finite(mx, sx, ax, ex), ny = step_finite(my, sy, ay, ey);
    x->observe(sx, ax, nx.next_state);
    y->observe(sy, ay, ny.next_state);
    sx = nx.next_state;
    sy = ny.next_state;
  }
}

TEST(DsPsrlTest, DoublingSchedule) {
  EXPECT_TRUE(DsPsrl::resample_at(1));
  EXPECT_TRUE(DsPsrl::resample_at(8));
  EXPECT_FALSE(DsPsrl::resample_at(9));
  EXPECT_FALSE(DsPsrl::resample_at(0));
  const auto s = riverswim_setup(false);
  auto agent = make(AgentKind::dspsrl, s, 7);
  rollout(*agent, riverswim_model(RiverSwimParams(0.9), 0.99), 0, 10000, 7);
  EXPECT_EQ(agent->resamples(), 14u);
  EXPECT_EQ(agent->explorations(), 0u);
}

TEST(TsmdpTest, ResamplesOnlyAtReferenceState) {
  const auto s = riverswim_setup(false);
  auto never = make(AgentKind::tsmdp, s, 8, DeltaSchedule::inverse_t(), 0);
  for (std::size_t t = 0; t < 50; ++t) never->act(t == 0 ? 0 : 3, t);
  EXPECT_EQ(never->resamples(), 1u);
  auto always = make(AgentKind::tsmdp, s, 8, DeltaSchedule::inverse_t(), 2);
  for (std::size_t t = 0; t < 50; ++t) always->act(2, t);
  EXPECT_EQ(always->resamples(), 50u);
  EXPECT_THROW(make(AgentKind::tsmdp, s, 8, DeltaSchedule::inverse_t(), 6), DomainError);
}

TEST(TsdeTest, EpisodeLengthsGrowByAtMostOne) {
  const auto s = riverswim_setup(false, 0.5);
  auto agent = make(AgentKind::tsde, s, 9);
  rollout(*agent, riverswim_model(RiverSwimParams(0.5), 0.99), 0, 5000, 9);
  auto* tsde = dynamic_cast<Tsde*>(agent.get());
  ASSERT_NE(tsde, nullptr);
  const auto& len = tsde->episode_lengths();
  ASSERT_GE(len.size(), 2u);
  for (std::size_t k = 1; k < len.size(); ++k) EXPECT_LE(len[k], len[k - 1] + 1);
}

TEST(TsdeTest, FirstVisitStartsNewEpisode) {
  const auto s = riverswim_setup(false, 0.5);
  auto agent = make(AgentKind::tsde, s, 10);
  auto* tsde = dynamic_cast<Tsde*>(agent.get());
  // Stay in state 0 until episodes are long, so the length rule is far from firing.
  std::size_t t = 0;
  while (tsde->episode_lengths().size() < 12) agent->act(0, t++);
  const auto before = agent->resamples();
  agent->act(0, t++);
  agent->act(5, t++);  // first visit of a pair at state 5
  EXPECT_EQ(agent->resamples(), before);
  agent->act(5, t++);
  EXPECT_EQ(agent->resamples(), before + 1);
}

TEST(PointMass, BaselinesFollowOptimalPolicy) {
  for (auto kind : {AgentKind::dspsrl, AgentKind::tsmdp, AgentKind::tsde}) {
    for (double th : {0.5, 0.9}) {
      const auto s = riverswim_setup(true, th);
      const auto truth = riverswim_model(RiverSwimParams(th), 0.99);
      const auto pi = value_iteration(truth).policy;
      auto agent = make(kind, s, 11);
      std::vector<std::size_t> states;
      const auto actions = rollout(*agent, truth, 2, 1000, 11, &states);
      for (std::size_t t = 0; t < actions.size(); ++t)
        ASSERT_EQ(actions[t], pi.action(states[t])) << agent_kind_name(kind);
    }
  }
}

TEST(UniformAgentTest, FrequenciesAndIndependence) {
  RngStream rng(12, 1);
  EXPECT_EQ(uniform_agent_step(1, rng), 0u);
  double ones = 0;
  for (int i = 0; i < 10000; ++i) ones += static_cast<double>(uniform_agent_step(2, rng));
  EXPECT_NEAR(ones / 10000, 0.5, 0.02);
  EXPECT_THROW(uniform_agent_step(0, rng), DomainError);

  const auto s = toy_setup(false);
  auto agent = make(AgentKind::uniform, s, 12);
  double by_state[2] = {0, 0}, n_state[2] = {0, 0};
  std::vector<std::size_t> states;
  const auto actions = rollout(*agent, toy_model(ToyParams(0.5, 0.5), 0.25), 0, 20000, 12, &states);
  for (std::size_t t = 0; t < actions.size(); ++t) {
    by_state[states[t]] += static_cast<double>(actions[t]);
    n_state[states[t]] += 1;
  }
  EXPECT_NEAR(by_state[0] / n_state[0], 0.5, 0.02);
  EXPECT_NEAR(by_state[1] / n_state[1], 0.5, 0.02);
  EXPECT_EQ(agent->counts().total(), 20000u);
}

TEST(Determinism, IdenticalSeedsGiveIdenticalActions) {
  for (auto kind : {AgentKind::ets, AgentKind::dspsrl, AgentKind::tsmdp, AgentKind::tsde, AgentKind::uniform}) {
    const auto s1 = riverswim_setup(false, 0.5), s2 = riverswim_setup(false, 0.5);
    auto a = make(kind, s1, 13, DeltaSchedule::constant(0.05));
    auto b = make(kind, s2, 13, DeltaSchedule::constant(0.05));
    const auto truth = riverswim_model(RiverSwimParams(0.5), 0.99);
    EXPECT_EQ(rollout(*a, truth, 0, 1500, 13), rollout(*b, truth, 0, 1500, 13)) << agent_kind_name(kind);
  }
}

TEST(AgentFactory, RejectsScenarioMismatches) {
  const auto s = toy_setup(false);
  EXPECT_THROW(make(AgentKind::gold, s, 1), ConfigError);
  EXPECT_THROW(make(AgentKind::naive_fqi, s, 1), ConfigError);
  EXPECT_THROW(make_cohort_agent(AgentKind::tsde, GlucoseParams{}, CohortConfig{}, CohortStreams::for_run(1, 0)),
               ConfigError);
  EXPECT_THROW(parse_agent_kind("ucrl"), ConfigError);
  EXPECT_EQ(parse_agent_kind("naive_fqi"), AgentKind::naive_fqi);
}

namespace {

std::vector<GlucoseState> cohort_states(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 5);
  std::vector<GlucoseState> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(glucose_initial_state(GlucoseParams{}, rng));
  return out;
}

CohortConfig small_cohort() {
  CohortConfig c;
  c.dataset.n_tuples = 300;
  c.fqi.n_iterations = 2;
  c.fqi.regressor.n_trees = 5;
  return c;
}

}  // namespace

TEST(Cohort, GoldIgnoresObservations) {
  const auto states = cohort_states(8, 1);
  GlucoseGold plain(GlucoseParams{}, small_cohort(), CohortStreams::for_run(2, 0));
  GlucoseGold fed(GlucoseParams{}, small_cohort(), CohortStreams::for_run(2, 0));
  const auto first = plain.act(states, 0);
  EXPECT_EQ(first, fed.act(states, 0));
  RngStream env(3, 3);
  std::vector<GlucoseStep> out;
  for (std::size_t i = 0; i < states.size(); ++i) out.push_back(glucose_step(GlucoseParams{}, states[i], first[i], env));
  fed.observe(states, first, out);
  EXPECT_EQ(plain.act(states, 1), fed.act(states, 1));
  EXPECT_EQ(plain.fits(), 1u);
  EXPECT_EQ(fed.fits(), 1u);
}

TEST(Cohort, NaiveFqiStartsUniform) {
  const auto states = cohort_states(400, 4);
  GlucoseNaiveFqi agent(GlucoseParams{}, small_cohort(), CohortStreams::for_run(5, 0));
  const auto a = agent.act(states, 0);
  double ones = 0;
  for (int x : a) ones += x;
  EXPECT_NEAR(ones / 400, 0.5, 0.1);
  EXPECT_EQ(agent.fits(), 0u);
  EXPECT_EQ(agent.explorations(), 400u);
}

TEST(Cohort, ThompsonRefitsOncePerExploitingStep) {
  auto cfg = small_cohort();
  cfg.schedule = DeltaSchedule::constant(0.0);
  const auto states = cohort_states(5, 6);
  GlucoseThompson agent(GlucoseParams{}, cfg, CohortStreams::for_run(7, 0), false);
  agent.act(states, 0);
  agent.act(states, 1);
  EXPECT_EQ(agent.fits(), 2u);
  EXPECT_EQ(agent.explorations(), 0u);
  cfg.schedule = DeltaSchedule::constant(1.0);
  GlucoseThompson explorer(GlucoseParams{}, cfg, CohortStreams::for_run(7, 0), false);
  explorer.act(states, 0);
  EXPECT_EQ(explorer.fits(), 0u);
  EXPECT_EQ(explorer.explorations(), 5u);
}
