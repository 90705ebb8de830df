#include "bayesrl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "bayesrl/environments.hpp"
#include "bayesrl/errors.hpp"
#include "bayesrl/planning.hpp"

namespace bayesrl {
namespace {

using Clock = std::chrono::steady_clock;

bool is_finite_agent(AgentKind kind) {
  return kind != AgentKind::gold && kind != AgentKind::naive_fqi;
}

bool is_glucose_agent(AgentKind kind) {
  return kind != AgentKind::tsmdp && kind != AgentKind::tsde;
}

/// (label, kind, schedule) for every agent the config runs.
struct AgentSpec {
  std::string label;
  AgentKind kind;
  DeltaSchedule schedule;
};

std::vector<AgentSpec> agent_specs(const ExperimentConfig& config) {
  std::vector<AgentSpec> out;
  for (AgentKind kind : config.agents) {
    if (kind == AgentKind::ets) {
      for (const auto& d : config.deltas) out.push_back({"ets:" + d.label(), kind, d});
    } else {
      out.push_back({std::string(agent_kind_name(kind)), kind,
                     config.deltas.empty() ? DeltaSchedule::inverse_t() : config.deltas.front()});
    }
  }
  return out;
}

bool keep_point(std::size_t t, std::size_t horizon, const ExperimentConfig& config) {
  if (t == 1 || t == horizon || t % config.record_every == 0) return true;
  return std::find(config.horizons.begin(), config.horizons.end(), t) != config.horizons.end();
}

MetricSeries make_series(const ExperimentConfig& config, const std::string& agent,
                         std::string name, std::size_t run) {
  MetricSeries s;
  s.scenario = std::string(scenario_name(config.scenario));
  s.agent = agent;
  s.name = std::move(name);
  s.run_id = run;
  return s;
}

std::string short_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string toy_variant(const ExperimentConfig& config) {
  return "theta0=" + short_number(config.theta0[0]) + "," + short_number(config.theta0[1]);
}

std::string riverswim_variant(std::size_t start, double theta0) {
  return "s0=" + std::to_string(start) + ",theta0=" + short_number(theta0);
}

std::string glucose_variant(std::size_t horizon) { return "T=" + std::to_string(horizon); }

struct FiniteCase {
  std::string variant;
  ParametricMdp family;
  std::vector<double> theta0;
  std::size_t start;  // internal index
  bool toy;
};

RunRecord run_finite_case(const ExperimentConfig& config, const FiniteCase& c,
                          const AgentSpec& spec, std::size_t run) {
  const auto started = Clock::now();
  const std::size_t horizon = config.horizons.front();
  const GridPosterior prior = GridPosterior::uniform(c.family.n_params(), config.grid_points);
  auto plans = std::make_shared<PlanCache>(c.family, prior);
  RegretEvaluator evaluator(plans, c.theta0, c.start);
  const Policy& pi_star = evaluator.optimal_policy();
  FiniteAgentOptions options{spec.schedule, c.start};
  auto agent = make_finite_agent(spec.kind, c.family, prior, plans,
                                 AgentStreams::for_run(config.seed, run), options);

  const FiniteMdpModel env = c.family.model(c.theta0);
  RngStream env_rng(config.seed, derive_stream_id(run, StreamPurpose::environment));
  RngStream metric_rng(config.seed, derive_stream_id(run, StreamPurpose::metric));

  MetricSeries err = make_series(config, spec.label, c.toy ? "param_l2" : "theta_abs_err", run);
  MetricSeries v_error = make_series(config, spec.label, "v_error", run);
  MetricSeries regret = make_series(config, spec.label, "regret", run);
  MetricSeries opt = make_series(config, spec.label, "opt_action", run);

  Trajectory traj;
  std::size_t s = c.start;
  traj.push_state(s);
  double last_err = 0.0, last_v = 0.0, last_regret = 0.0;
  for (std::size_t k = 0; k < horizon; ++k) {
    const std::size_t a = agent->act(s, k);
    const std::size_t cell = agent->resampled_last() ? *agent->sampled_cell()
                                                     : agent->posterior().sample_cell(metric_rng);
    const auto theta = plans->theta(cell);
    last_err = param_l2_error(theta, c.theta0);
    const std::size_t t = k + 1;
    const bool keep = keep_point(t, horizon, config);
    if (c.toy) {
      const RegretQuantities rq = evaluator.evaluate(cell);
      last_v = rq.v_error;
      last_regret = rq.regret;
      if (keep) {
        v_error.push(t, rq.v_error);
        regret.push(t, rq.regret);
      }
    }
    if (keep) {
      err.push(t, last_err);
      opt.push(t, a == pi_star.action(s) ? 1.0 : 0.0);
    }
    const StepResult step = step_finite(env, s, a, env_rng);
    agent->observe(s, a, step.next_state);
    traj.record(a, step.reward, step.next_state);
    s = step.next_state;
  }

  RunRecord rec;
  rec.variant = c.variant;
  rec.agent = spec.label;
  rec.run_id = run;
  rec.scalars["opt_action"] = optimal_action_proportion(traj, pi_star);
  rec.scalars[err.name] = last_err;
  if (c.toy) {
    rec.scalars["v_error"] = last_v;
    rec.scalars["regret"] = last_regret;
    rec.series = {std::move(err), std::move(v_error), std::move(regret), std::move(opt)};
  } else {
    rec.series = {std::move(err), std::move(opt)};
  }
  rec.resamples = agent->resamples();
  rec.explorations = agent->explorations();
  rec.seconds = std::chrono::duration<double>(Clock::now() - started).count();
  return rec;
}

std::vector<RunRecord> run_glucose_run(const ExperimentConfig& config, const AgentSpec& spec,
                                       std::size_t run) {
  const auto started = Clock::now();
  const std::size_t horizon = *std::max_element(config.horizons.begin(), config.horizons.end());
  CohortConfig cohort = config.cohort;
  cohort.schedule = spec.schedule;
  auto agent = make_cohort_agent(spec.kind, config.glucose, cohort,
                                 CohortStreams::for_run(config.seed, run));

  const RngStream env(config.seed, derive_stream_id(run, StreamPurpose::environment));
  std::vector<RngStream> patient_rng;
  std::vector<GlucoseState> states;
  for (std::size_t i = 0; i < config.n_patients; ++i) {
    patient_rng.push_back(env.substream(i));
    states.push_back(glucose_initial_state(config.glucose, patient_rng.back()));
  }

  MetricSeries cum = make_series(config, spec.label, "cum_reward", run);
  std::vector<double> per_step_total(horizon);
  double total = 0.0;
  std::vector<GlucoseStep> outcomes(config.n_patients);
  for (std::size_t k = 0; k < horizon; ++k) {
    const std::vector<int> actions = agent->act(states, k);
    for (std::size_t i = 0; i < config.n_patients; ++i) {
      outcomes[i] = glucose_step(config.glucose, states[i], actions[i], patient_rng[i]);
      total += outcomes[i].reward;
    }
    agent->observe(states, actions, outcomes);
    for (std::size_t i = 0; i < config.n_patients; ++i) states[i] = outcomes[i].next;
    const double avg = total / static_cast<double>(config.n_patients);
    if (!std::isfinite(avg)) throw NumericalError("glucose: cumulative reward is not finite");
    per_step_total[k] = avg;
    if (keep_point(k + 1, horizon, config)) cum.push(k + 1, avg);
  }

  const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
  std::vector<RunRecord> out;
  for (std::size_t h : config.horizons) {
    RunRecord rec;
    rec.variant = glucose_variant(h);
    rec.agent = spec.label;
    rec.run_id = run;
    MetricSeries truncated = make_series(config, spec.label, "cum_reward", run);
    for (std::size_t i = 0; i < cum.size(); ++i)
      if (cum.times[i] <= h) truncated.push(cum.times[i], cum.values[i]);
    rec.series = {std::move(truncated)};
    rec.scalars["cum_reward"] = per_step_total[h - 1];
    rec.resamples = agent->fits();
    rec.explorations = agent->explorations();
    rec.seconds = seconds;
    out.push_back(std::move(rec));
  }
  return out;
}

/// Runs tasks on `jobs` threads; results keep task order and the first
/// failing task (by index) is rethrown.
std::vector<RunRecord> run_pool(std::vector<std::function<std::vector<RunRecord>()>> tasks,
                                std::size_t jobs) {
  std::vector<std::vector<RunRecord>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        results[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<RunRecord> out;
  for (auto& r : results)
    for (auto& rec : r) out.push_back(std::move(rec));
  return out;
}

std::vector<FiniteCase> finite_cases(const ExperimentConfig& config) {
  std::vector<FiniteCase> cases;
  if (config.scenario == Scenario::toy) {
    cases.push_back({toy_variant(config), toy_family(config.gamma), config.theta0,
                     config.start_states.front(), true});
  } else {
    for (std::size_t start : config.start_states)
      for (double th : config.theta0)
        cases.push_back({riverswim_variant(start, th), riverswim_family(config.gamma), {th},
                         riverswim::internal_state(start), false});
  }
  return cases;
}

std::vector<std::function<std::vector<RunRecord>()>> finite_tasks(const ExperimentConfig& config) {
  auto cases = std::make_shared<std::vector<FiniteCase>>(finite_cases(config));
  std::vector<std::function<std::vector<RunRecord>()>> tasks;
  for (std::size_t c = 0; c < cases->size(); ++c)
    for (const auto& spec : agent_specs(config))
      for (std::size_t run = 0; run < config.n_runs; ++run)
        tasks.push_back([&config, cases, c, spec, run] {
          return std::vector<RunRecord>{run_finite_case(config, (*cases)[c], spec, run)};
        });
  return tasks;
}

std::vector<std::function<std::vector<RunRecord>()>> glucose_tasks(const ExperimentConfig& config) {
  std::vector<std::function<std::vector<RunRecord>()>> tasks;
  for (const auto& spec : agent_specs(config))
    for (std::size_t run = 0; run < config.n_runs; ++run)
      tasks.push_back([&config, spec, run] { return run_glucose_run(config, spec, run); });
  return tasks;
}

/// Glucose records come out grouped by run; regroup by variant so every
/// (variant, agent) block is contiguous.
void order_by_variant(std::vector<RunRecord>& records, const std::vector<std::size_t>& horizons) {
  std::stable_sort(records.begin(), records.end(), [&](const RunRecord& a, const RunRecord& b) {
    auto rank = [&](const RunRecord& r) {
      for (std::size_t i = 0; i < horizons.size(); ++i)
        if (glucose_variant(horizons[i]) == r.variant) return i;
      return horizons.size();
    };
    return rank(a) < rank(b);
  });
}

std::string slug(std::string_view variant) {
  std::string out;
  for (char ch : variant) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-')
      out.push_back(ch);
    else if (ch == '=')
      out.push_back('-');
    else
      out.push_back('_');
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace

std::string_view scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::toy: return "toy";
    case Scenario::riverswim: return "riverswim";
    case Scenario::glucose: return "glucose";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  for (auto s : {Scenario::toy, Scenario::riverswim, Scenario::glucose})
    if (scenario_name(s) == name) return s;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::defaults(Scenario scenario, bool paper_scale) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.paper_scale = paper_scale;
  switch (scenario) {
    case Scenario::toy:
      c.agents = {AgentKind::uniform, AgentKind::ets};
      c.deltas = {DeltaSchedule::power(-0.25)};
      c.horizons = {paper_scale ? 5000u : 2000u};
      c.n_runs = paper_scale ? 100 : 20;
      c.gamma = 0.25;
      c.grid_points = 256;
      c.theta0 = {0.2, 0.4};
      c.start_states = {0};
      break;
    case Scenario::riverswim:
      c.agents = {AgentKind::ets, AgentKind::tsmdp, AgentKind::tsde, AgentKind::dspsrl};
      c.deltas = {DeltaSchedule::inverse_t(), DeltaSchedule::constant(0.05)};
      c.horizons = {10000};
      c.n_runs = paper_scale ? 100 : 10;
      c.record_every = 10;
      c.gamma = 0.99;
      c.grid_points = 1024;
      c.theta0 = {0.5, 0.9};
      c.start_states = {1, 3};
      break;
    case Scenario::glucose:
      c.agents = {AgentKind::gold, AgentKind::ets, AgentKind::naive_fqi};
      c.deltas = {DeltaSchedule::constant(0.05)};
      c.horizons = {30, 50};
      c.n_runs = paper_scale ? 50 : 10;
      c.n_patients = paper_scale ? 70 : 20;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (agents.empty()) fail("at least one agent is required");
  if (horizons.empty()) fail("a horizon is required");
  for (auto h : horizons)
    if (h < 1) fail("horizon must be >= 1");
  if (n_runs < 1) fail("runs must be >= 1");
  if (jobs < 1) fail("jobs must be >= 1");
  if (record_every < 1) fail("record-every must be >= 1");
  const bool uses_ets = std::find(agents.begin(), agents.end(), AgentKind::ets) != agents.end();
  if (uses_ets && deltas.empty()) fail("the ets agent needs at least one delta schedule");
  for (const auto& d : deltas) {
    for (std::size_t t : {std::size_t{0}, std::size_t{1}, std::size_t{1000}}) {
      const double v = d(t);
      if (!(v >= 0.0 && v <= 1.0)) fail("delta schedule leaves [0, 1]");
    }
  }
  std::set<AgentKind> seen;
  for (AgentKind a : agents) {
    if (!seen.insert(a).second) fail("agent '" + std::string(agent_kind_name(a)) + "' listed twice");
    if (scenario == Scenario::glucose ? !is_glucose_agent(a) : !is_finite_agent(a))
      fail("agent '" + std::string(agent_kind_name(a)) + "' is not available for scenario '" +
           std::string(scenario_name(scenario)) + "'");
  }
  auto check_theta = [&](double th) {
    if (!(th >= kThetaLower && th <= kThetaUpper)) fail("theta0 must lie in [0.01, 0.99]");
  };
  switch (scenario) {
    case Scenario::toy:
      if (horizons.size() != 1) fail("toy takes a single horizon");
      if (theta0.size() != 2) fail("toy theta0 needs two values");
      for (double th : theta0) check_theta(th);
      if (start_states.size() != 1 || start_states.front() > 1) fail("toy start state must be 0 or 1");
      break;
    case Scenario::riverswim:
      if (horizons.size() != 1) fail("riverswim takes a single horizon");
      if (theta0.empty()) fail("riverswim needs at least one theta0");
      for (double th : theta0) check_theta(th);
      if (start_states.empty()) fail("riverswim needs at least one start state");
      for (auto s : start_states)
        if (s < 1 || s > riverswim::kStates) fail("riverswim start states are 1..6");
      break;
    case Scenario::glucose:
      if (n_patients < 1) fail("patients must be >= 1");
      if (cohort.fqi.n_iterations < 1) fail("fqi-iters must be >= 1");
      if (cohort.dataset.n_tuples < 1) fail("fqi-tuples must be >= 1");
      if (cohort.dataset.episode_length < 1) fail("episode length must be >= 1");
      if (!(cohort.fqi.gamma >= 0.0 && cohort.fqi.gamma < 1.0)) fail("fqi gamma must lie in [0, 1)");
      if (cohort.fqi.regressor.n_trees < 1) fail("trees must be >= 1");
      if (cohort.fqi.regressor.min_leaf < 1) fail("min leaf must be >= 1");
      if (cohort.fqi.regressor.k_neighbors < 1) fail("k must be >= 1");
      if (!(cohort.prior_variance > 0.0)) fail("prior variance must be positive");
      if (!(glucose.sigma > 0.0)) fail("glucose noise sd must be positive");
      try {
        glucose.validate();
      } catch (const DomainError& e) {
        fail(e.what());
      }
      break;
  }
  if (scenario != Scenario::glucose) {
    if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
    if (grid_points < 2) fail("grid points must be >= 2");
  }
}

std::string ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario_name(scenario);
  std::vector<std::string> agent_names;
  for (auto a : agents) agent_names.emplace_back(agent_kind_name(a));
  j["agents"] = agent_names;
  std::vector<std::string> delta_labels;
  for (const auto& d : deltas) delta_labels.push_back(d.label());
  j["deltas"] = delta_labels;
  j["horizons"] = horizons;
  j["runs"] = n_runs;
  j["seed"] = seed;
  j["record_every"] = record_every;
  j["paper_scale"] = paper_scale;
  if (scenario == Scenario::glucose) {
    j["patients"] = n_patients;
    j["beta"] = glucose.beta;
    j["sigma"] = glucose.sigma;
    j["diet"] = {{"mean", glucose.diet_mean}, {"sd", glucose.diet_sd}, {"prob", glucose.diet_prob}};
    j["exercise"] = {{"mean", glucose.exercise_mean},
                     {"sd", glucose.exercise_sd},
                     {"prob", glucose.exercise_prob}};
    j["initial_glucose"] = glucose.initial_glucose;
    j["initial_action"] = 0;
    j["prior_variance"] = cohort.prior_variance;
    j["naive_min_tuples"] = cohort.naive_min_tuples;
    const auto& r = cohort.fqi.regressor;
    j["fqi"] = {{"iterations", cohort.fqi.n_iterations},
                {"gamma", cohort.fqi.gamma},
                {"target_clip", cohort.fqi.target_clip},
                {"tuples", cohort.dataset.n_tuples},
                {"episode_length", cohort.dataset.episode_length},
                {"action_probability", cohort.dataset.action_probability},
                {"regressor", r.kind == RegressorConfig::Kind::knn ? "knn" : "extra_trees"},
                {"trees", r.n_trees},
                {"min_leaf", r.min_leaf},
                {"split_candidates", r.split_candidates},
                {"k_neighbors", r.k_neighbors}};
  } else {
    j["gamma"] = gamma;
    j["grid_points"] = grid_points;
    j["theta0"] = theta0;
    j["start_states"] = start_states;
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> agent_labels(const ExperimentConfig& config) {
  std::vector<std::string> out;
  for (const auto& s : agent_specs(config)) out.push_back(s.label);
  return out;
}

std::vector<RunRecord> run_toy(const ExperimentConfig& config) {
  if (config.scenario != Scenario::toy) throw ConfigError("run_toy: scenario is not toy");
  config.validate();
  return run_pool(finite_tasks(config), config.jobs);
}

std::vector<RunRecord> run_riverswim(const ExperimentConfig& config) {
  if (config.scenario != Scenario::riverswim)
    throw ConfigError("run_riverswim: scenario is not riverswim");
  config.validate();
  return run_pool(finite_tasks(config), config.jobs);
}

std::vector<RunRecord> run_glucose(const ExperimentConfig& config) {
  if (config.scenario != Scenario::glucose) throw ConfigError("run_glucose: scenario is not glucose");
  config.validate();
  auto records = run_pool(glucose_tasks(config), config.jobs);
  order_by_variant(records, config.horizons);
  return records;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  switch (config.scenario) {
    case Scenario::toy: result.records = run_toy(config); break;
    case Scenario::riverswim: result.records = run_riverswim(config); break;
    case Scenario::glucose: result.records = run_glucose(config); break;
  }
  result.table = aggregate(scenario_name(config.scenario), result.records);
  return result;
}

const SummaryRow& AggregateTable::find(std::string_view agent, std::string_view variant,
                                       std::string_view metric) const {
  for (const auto& row : summary)
    if (row.agent == agent && row.variant == variant && row.metric == metric) return row;
  throw DomainError("summary has no row for " + std::string(agent) + " / " + std::string(variant) +
                    " / " + std::string(metric));
}

AggregateTable aggregate(std::string_view scenario, const std::vector<RunRecord>& records) {
  AggregateTable table;
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    auto key = std::make_pair(r.variant, r.agent);
    auto& g = groups[key];
    if (g.empty()) keys.push_back(key);
    g.push_back(&r);
  }
  for (const auto& key : keys) {
    auto group = groups[key];
    // Reduction order is fixed by run id so the result is permutation-invariant.
    std::sort(group.begin(), group.end(),
              [](const RunRecord* a, const RunRecord* b) { return a->run_id < b->run_id; });
    const RunRecord& first = *group.front();
    for (const RunRecord* r : group) {
      if (r->series.size() != first.series.size())
        throw DomainError("aggregate: runs of one group recorded different metrics");
      for (std::size_t m = 0; m < first.series.size(); ++m)
        if (r->series[m].name != first.series[m].name || r->series[m].times != first.series[m].times)
          throw DomainError("aggregate: runs of one group recorded different time grids");
      if (r->scalars.size() != first.scalars.size())
        throw DomainError("aggregate: runs of one group reported different scalars");
    }
    for (const auto& [metric, unused] : first.scalars) {
      (void)unused;
      std::vector<double> values;
      for (const RunRecord* r : group) {
        auto it = r->scalars.find(metric);
        if (it == r->scalars.end()) throw DomainError("aggregate: scalar '" + metric + "' missing");
        values.push_back(it->second);
      }
      table.summary.push_back({std::string(scenario), key.second, key.first, metric, mean_stderr(values)});
    }
    for (std::size_t m = 0; m < first.series.size(); ++m) {
      const auto& times = first.series[m].times;
      std::vector<double> column(group.size());
      for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t r = 0; r < group.size(); ++r) column[r] = group[r]->series[m].values[i];
        table.mean_series.push_back({key.first, key.second, first.series[m].name, times[i],
                                     mean_stderr(column)});
      }
    }
  }
  return table;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_series_csv(const std::filesystem::path& path, std::string_view scenario,
                      const std::vector<const RunRecord*>& records) {
  auto out = open_output(path);
  out << kSeriesHeader << '\n';
  for (const RunRecord* r : records)
    for (const auto& s : r->series)
      for (std::size_t i = 0; i < s.size(); ++i)
        out << scenario << ',' << r->agent << ',' << r->run_id << ',' << s.times[i] << ',' << s.name
            << ',' << format_number(s.values[i]) << '\n';
  finish_output(out, path);
}

void write_summary_csv(const std::filesystem::path& path, const AggregateTable& table) {
  auto out = open_output(path);
  out << kSummaryHeader << '\n';
  for (const auto& row : table.summary)
    out << row.scenario << ',' << row.agent << ",\"" << row.variant << "\"," << row.metric << ','
        << format_number(row.stat.mean) << ',' << format_number(row.stat.stderr_) << ','
        << row.stat.n << '\n';
  finish_output(out, path);
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
  const std::string scenario(scenario_name(result.config.scenario));

  {
    const auto path = dir / "config.json";
    auto out = open_output(path);
    out << result.config.to_json();
    finish_output(out, path);
  }

  std::vector<std::string> variants;
  for (const auto& r : result.records)
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end())
      variants.push_back(r.variant);
  for (const auto& v : variants) {
    std::vector<const RunRecord*> subset;
    for (const auto& r : result.records)
      if (r.variant == v) subset.push_back(&r);
    write_series_csv(dir / ("series_" + slug(v) + ".csv"), scenario, subset);

    const auto path = dir / ("mean_series_" + slug(v) + ".csv");
    auto out = open_output(path);
    out << kMeanSeriesHeader << '\n';
    for (const auto& row : result.table.mean_series)
      if (row.variant == v)
        out << scenario << ',' << row.agent << ",\"" << row.variant << "\"," << row.t << ','
            << row.metric << ',' << format_number(row.stat.mean) << ','
            << format_number(row.stat.stderr_) << ',' << row.stat.n << '\n';
    finish_output(out, path);
  }
  write_summary_csv(dir / "summary.csv", result.table);

  if (result.config.scenario == Scenario::toy) {
    const auto path = dir / "reference_curves.csv";
    auto out = open_output(path);
    out << "t,curve,value\n";
    const std::size_t horizon = result.config.horizons.front();
    const std::pair<const char*, double> curves[] = {
        {"t^-1/2", -0.5}, {"t^-9/20", -0.45}, {"t^-1/4", -0.25}};
    for (const auto& [name, p] : curves)
      for (std::size_t t = 1; t <= horizon; ++t)
        if (keep_point(t, horizon, result.config))
          out << t << ',' << name << ',' << format_number(std::pow(static_cast<double>(t), p)) << '\n';
    finish_output(out, path);
  }
}

}  // namespace bayesrl
