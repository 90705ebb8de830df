#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bayesrl/agents.hpp"
#include "bayesrl/fqi.hpp"
#include "bayesrl/glucose.hpp"
#include "bayesrl/metrics.hpp"

namespace bayesrl {

enum class Scenario { toy, riverswim, glucose };

std::string_view scenario_name(Scenario scenario);
/// Throws ConfigError for unknown names.
Scenario parse_scenario(std::string_view name);

struct ExperimentConfig {
  Scenario scenario = Scenario::toy;
  std::vector<AgentKind> agents;
  /// Schedules used by the ets agent; each one is run as its own agent label.
  std::vector<DeltaSchedule> deltas;
  /// Glucose reports every listed horizon from one simulation of the
  /// longest; the finite scenarios take exactly one.
  std::vector<std::size_t> horizons;
  std::size_t n_runs = 1;
  std::uint64_t seed = 20240101;
  std::size_t jobs = 1;
  /// Series points are kept at t = 1, t = T and every multiple of this.
  std::size_t record_every = 1;
  std::filesystem::path output_dir;
  bool paper_scale = false;

  // finite scenarios
  double gamma = 0.25;
  std::size_t grid_points = 256;
  /// Toy: the two-vector (theta1, theta2); RiverSwim: list of theta0 cases.
  std::vector<double> theta0;
  /// Toy: a single internal state; RiverSwim: external states 1..6.
  std::vector<std::size_t> start_states;

  // glucose
  std::size_t n_patients = 20;
  GlucoseParams glucose;
  CohortConfig cohort;

  /// Desk-scale or paper-scale defaults of a scenario.
  static ExperimentConfig defaults(Scenario scenario, bool paper_scale);

  /// Throws ConfigError on any inadmissible value or scenario/agent pair.
  void validate() const;
  /// Pretty-printed JSON snapshot of every setting.
  std::string to_json() const;
};

/// One (variant, agent, run) simulation.
struct RunRecord {
  std::string variant;
  std::string agent;
  std::size_t run_id = 0;
  std::vector<MetricSeries> series;
  /// Per-run scalars reduced into the summary table.
  std::map<std::string, double> scalars;
  double seconds = 0.0;
  std::size_t resamples = 0;
  std::size_t explorations = 0;
};

struct SummaryRow {
  std::string scenario;
  std::string agent;
  std::string variant;
  std::string metric;
  MeanStderr stat;
};

struct MeanSeriesRow {
  std::string variant;
  std::string agent;
  std::string metric;
  std::size_t t = 0;
  MeanStderr stat;
};

struct AggregateTable {
  std::vector<SummaryRow> summary;
  std::vector<MeanSeriesRow> mean_series;

  /// Summary entry; throws DomainError if absent.
  const SummaryRow& find(std::string_view agent, std::string_view variant,
                         std::string_view metric) const;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunRecord> records;
  AggregateTable table;
};

/// Agent labels in run order, e.g. "ets:inv_t", "tsmdp".
std::vector<std::string> agent_labels(const ExperimentConfig& config);

std::vector<RunRecord> run_toy(const ExperimentConfig& config);
std::vector<RunRecord> run_riverswim(const ExperimentConfig& config);
std::vector<RunRecord> run_glucose(const ExperimentConfig& config);

/// Validates, runs every simulation on a pool of config.jobs workers and
/// aggregates. Results do not depend on the number of workers.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Per-step means and per-run scalar summaries grouped by (variant, agent).
/// Throws DomainError if runs of one group recorded different time grids.
AggregateTable aggregate(std::string_view scenario, const std::vector<RunRecord>& records);

/// printf "%.17g".
std::string format_number(double value);

/// Writes config.json, series*.csv, mean_series*.csv, summary.csv and, for
/// the toy scenario, reference_curves.csv. Throws IoError naming the path.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

void write_series_csv(const std::filesystem::path& path, std::string_view scenario,
                      const std::vector<const RunRecord*>& records);
void write_summary_csv(const std::filesystem::path& path, const AggregateTable& table);

inline constexpr std::string_view kSeriesHeader = "scenario,agent,run_id,t,metric,value";
inline constexpr std::string_view kSummaryHeader = "scenario,agent,variant,metric,mean,stderr,n_runs";
inline constexpr std::string_view kMeanSeriesHeader = "scenario,agent,variant,t,metric,mean,stderr,n_runs";

}  // namespace bayesrl
