#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "bayesrl/errors.hpp"
#include "bayesrl/experiments.hpp"
#include "bayesrl/kernels.hpp"

namespace {

using namespace bayesrl;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Options {
  std::vector<std::string> agents;
  std::vector<std::string> deltas;
  std::vector<std::size_t> horizons;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "results";
  bool paper_scale = false;
  std::vector<double> theta0;
  std::vector<std::size_t> start_states;
  std::size_t patients = 0;
  std::size_t fqi_iters = 0;
  std::size_t fqi_tuples = 0;
  std::string regressor;
  std::size_t jobs = 0;
  std::size_t record_every = 0;
  std::string kernels;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--agent", o.agents, "Agents to run (comma separated)")->delimiter(',');
  cmd->add_option("--delta", o.deltas, "ets exploration schedules: const:<c>, inv_t or pow:<p>")
      ->delimiter(',');
  cmd->add_option("--horizon", o.horizons, "Horizon T (glucose accepts a list)")->delimiter(',');
  cmd->add_option("--runs", o.runs, "Monte-Carlo runs");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_flag("--paper-scale", o.paper_scale, "Use the full-scale settings");
  cmd->add_option("--jobs", o.jobs, "Worker threads (default: hardware concurrency)");
  cmd->add_option("--record-every", o.record_every, "Keep every k-th series point");
  cmd->add_option("--kernels", o.kernels, "Kernel backend: scalar or avx2");
}

bool given(const CLI::App& cmd, const std::string& name) {
  const CLI::Option* opt = cmd.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

ExperimentConfig build_config(Scenario scenario, const Options& o, const CLI::App& cmd) {
  ExperimentConfig c = ExperimentConfig::defaults(scenario, o.paper_scale);
  if (!o.agents.empty()) {
    c.agents.clear();
    for (const auto& a : o.agents) c.agents.push_back(parse_agent_kind(a));
  }
  if (!o.deltas.empty()) {
    c.deltas.clear();
    for (const auto& d : o.deltas) c.deltas.push_back(DeltaSchedule::parse(d));
  }
  if (!o.horizons.empty()) c.horizons = o.horizons;
  if (given(cmd, "--runs")) c.n_runs = o.runs;
  if (given(cmd, "--seed")) c.seed = o.seed;
  c.jobs = given(cmd, "--jobs") ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  if (given(cmd, "--record-every")) c.record_every = o.record_every;
  c.output_dir = o.out;
  if (!o.theta0.empty()) c.theta0 = o.theta0;
  if (!o.start_states.empty()) c.start_states = o.start_states;
  if (given(cmd, "--patients")) c.n_patients = o.patients;
  if (given(cmd, "--fqi-iters")) c.cohort.fqi.n_iterations = o.fqi_iters;
  if (given(cmd, "--fqi-tuples")) c.cohort.dataset.n_tuples = o.fqi_tuples;
  if (!o.regressor.empty()) {
    if (o.regressor == "trees")
      c.cohort.fqi.regressor.kind = RegressorConfig::Kind::extra_trees;
    else if (o.regressor == "knn")
      c.cohort.fqi.regressor.kind = RegressorConfig::Kind::knn;
    else
      throw ConfigError("regressor must be 'trees' or 'knn'");
  }
  return c;
}

void print_summary(const ExperimentResult& result) {
  std::printf("%-22s %-26s %-14s %14s %12s %6s\n", "agent", "variant", "metric", "mean", "stderr", "runs");
  for (const auto& row : result.table.summary)
    std::printf("%-22s %-26s %-14s %14.6g %12.4g %6zu\n", row.agent.c_str(), row.variant.c_str(),
                row.metric.c_str(), row.stat.mean, row.stat.stderr_, row.stat.n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian RL simulation studies: toy MDP, RiverSwim and glucose control"};
  app.require_subcommand(1);
  Options o;

  auto* toy = app.add_subcommand("toy", "Two-state toy MDP (posterior rates, V-error, regret)");
  add_common(toy, o);
  toy->add_option("--theta0", o.theta0, "True (theta1,theta2)")->delimiter(',');
  toy->add_option("--start-state", o.start_states, "Initial state (0 or 1)");

  auto* river = app.add_subcommand("riverswim", "Six-state RiverSwim (optimal-action proportions)");
  add_common(river, o);
  river->add_option("--theta0", o.theta0, "True swim success probabilities")->delimiter(',');
  river->add_option("--start-state", o.start_states, "Start states in 1..6")->delimiter(',');

  auto* glucose = app.add_subcommand("glucose", "AR(2) glucose cohort (cumulative reward)");
  add_common(glucose, o);
  glucose->add_option("--patients", o.patients, "Patients per cohort");
  glucose->add_option("--fqi-iters", o.fqi_iters, "Fitted Q iterations");
  glucose->add_option("--fqi-tuples", o.fqi_tuples, "Simulated tuples per FQI fit");
  glucose->add_option("--regressor", o.regressor, "FQI regressor: trees or knn");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!o.kernels.empty()) {
      try {
        kernels::set_backend(kernels::parse_backend(o.kernels));
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    }
    CLI::App* cmd = app.get_subcommands().front();
    const Scenario scenario = parse_scenario(cmd->get_name());
    const ExperimentConfig config = build_config(scenario, o, *cmd);
    config.validate();
    const ExperimentResult result = run_experiment(config);
    write_outputs(result, config.output_dir);
    print_summary(result);
    std::cerr << "wrote " << config.output_dir.string() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
