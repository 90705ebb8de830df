// Acceptance runner: one PASS/FAIL line per criterion.
//
//   bayesrl_acceptance [criterion ...] [--jobs N]
//
// With no criteria listed all eight are run. Exit status is 0 only if every
// selected criterion passes.

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bayesrl/agents.hpp"
#include "bayesrl/environments.hpp"
#include "bayesrl/experiments.hpp"
#include "bayesrl/gaussian_posterior.hpp"
#include "bayesrl/grid_posterior.hpp"
#include "bayesrl/metrics.hpp"
#include "bayesrl/planning.hpp"
#include "oracles.hpp"

using namespace bayesrl;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kUniformSlopeLow = -0.70;
constexpr double kUniformSlopeHigh = -0.35;
constexpr double kEtsSlopeMax = -0.20;
constexpr std::size_t kSlopeFrom = 200;
constexpr std::size_t kSlopeTo = 2000;
constexpr std::size_t kDecayReference = 100;
constexpr double kDecayRatio = 0.25;
constexpr double kInvTProportion = 0.95;
constexpr double kConstLow = 0.93;
constexpr double kConstHigh = 0.99;
constexpr double kTsmdpGap = 0.15;
constexpr double kTsmdpOtherCells = 0.95;
constexpr double kBetaOracleTol = 1e-10;
constexpr double kEnumerationValueTol = 1e-8;
constexpr double kBlrTol = 1e-8;
constexpr double kMonteCarloSe = 3.0;
constexpr double kNormalizationTol = 1e-12;
constexpr double kTriangleSlack = 1e-12;
constexpr double kExplorationTol = 0.01;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << (ok ? "" : "FAILED ") << what;
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::size_t g_jobs = 1;

std::string river_variant(std::size_t s0, double theta0) {
  return "s0=" + std::to_string(s0) + ",theta0=" + fmt(theta0, 6);
}

std::vector<std::pair<std::size_t, double>> mean_series(const AggregateTable& table, const std::string& agent,
                                                        const std::string& metric) {
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& row : table.mean_series)
    if (row.agent == agent && row.metric == metric) out.emplace_back(row.t, row.stat.mean);
  std::sort(out.begin(), out.end());
  return out;
}

double value_at(const std::vector<std::pair<std::size_t, double>>& series, std::size_t t) {
  for (const auto& [time, v] : series)
    if (time == t) return v;
  throw DomainError("mean series has no point at t=" + std::to_string(t));
}

ExperimentConfig toy_config() {
  auto c = ExperimentConfig::defaults(Scenario::toy, false);
  c.agents = {AgentKind::uniform, AgentKind::ets};
  c.deltas = {DeltaSchedule::power(-0.25)};
  c.horizons = {kSlopeTo};
  c.n_runs = 20;
  c.jobs = g_jobs;
  return c;
}

const ExperimentResult& toy_result() {
  static const ExperimentResult result = run_experiment(toy_config());
  return result;
}

ExperimentResult riverswim_result(std::vector<AgentKind> agents, std::vector<DeltaSchedule> deltas) {
  auto c = ExperimentConfig::defaults(Scenario::riverswim, false);
  c.agents = std::move(agents);
  c.deltas = std::move(deltas);
  c.horizons = {10000};
  c.n_runs = 10;
  c.theta0 = {0.5, 0.9};
  c.start_states = {1, 3};
  c.jobs = g_jobs;
  return run_experiment(c);
}

Outcome criterion_1() {
  Outcome o;
  const auto& table = toy_result().table;
  for (const std::string agent : {"uniform", "ets:pow:-0.25"}) {
    const auto series = mean_series(table, agent, "param_l2");
    std::vector<std::size_t> t;
    std::vector<double> v;
    for (const auto& [time, value] : series)
      if (time >= kSlopeFrom && time <= kSlopeTo) {
        t.push_back(time);
        v.push_back(value);
      }
    const double slope = loglog_slope(t, v, kSlopeFrom);
    if (agent == "uniform")
      o.check(slope >= kUniformSlopeLow && slope <= kUniformSlopeHigh,
              "uniform slope " + fmt(slope) + " in [" + fmt(kUniformSlopeLow) + ", " + fmt(kUniformSlopeHigh) + "]");
    else
      o.check(slope <= kEtsSlopeMax, "ets pow:-0.25 slope " + fmt(slope) + " <= " + fmt(kEtsSlopeMax));
  }
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const auto& result = toy_result();
  for (const std::string agent : {"uniform", "ets:pow:-0.25"}) {
    for (const std::string metric : {"v_error", "regret"}) {
      const auto series = mean_series(result.table, agent, metric);
      const double early = value_at(series, kDecayReference), late = value_at(series, kSlopeTo);
      o.check(late < kDecayRatio * early, agent + " " + metric + "(T)=" + fmt(late) + " < " + fmt(kDecayRatio) +
                                              " x " + metric + "(100)=" + fmt(early));
    }
  }
  bool nonneg = true;
  for (const auto& rec : result.records)
    for (const auto& s : rec.series)
      if (s.name == "regret")
        for (double v : s.values) nonneg = nonneg && v >= 0.0;
  o.check(nonneg, "regret >= 0 at every step of every run");
  return o;
}

Outcome criterion_3() {
  Outcome o;
  const auto result = riverswim_result({AgentKind::ets}, {DeltaSchedule::inverse_t(), DeltaSchedule::constant(0.05)});
  for (std::size_t s0 : {1, 3})
    for (double th : {0.5, 0.9}) {
      const auto v = river_variant(s0, th);
      const double inv = result.table.find("ets:inv_t", v, "opt_action").stat.mean;
      const double cst = result.table.find("ets:const:0.05", v, "opt_action").stat.mean;
      o.check(inv >= kInvTProportion, v + " inv_t " + fmt(inv, 5) + " >= " + fmt(kInvTProportion));
      o.check(cst >= kConstLow && cst <= kConstHigh,
              v + " const:0.05 " + fmt(cst, 5) + " in [" + fmt(kConstLow) + ", " + fmt(kConstHigh) + "]");
    }
  return o;
}

Outcome criterion_4() {
  Outcome o;
  const auto result = riverswim_result({AgentKind::ets, AgentKind::tsmdp}, {DeltaSchedule::inverse_t()});
  for (std::size_t s0 : {1, 3})
    for (double th : {0.5, 0.9}) {
      const auto v = river_variant(s0, th);
      const double ts = result.table.find("tsmdp", v, "opt_action").stat.mean;
      if (s0 == 3 && th == 0.9) {
        const double ets = result.table.find("ets:inv_t", v, "opt_action").stat.mean;
        o.check(ets - ts >= kTsmdpGap, v + " ets " + fmt(ets, 5) + " - tsmdp " + fmt(ts, 5) + " >= " + fmt(kTsmdpGap));
      } else {
        o.check(ts >= kTsmdpOtherCells, v + " tsmdp " + fmt(ts, 5) + " >= " + fmt(kTsmdpOtherCells));
      }
    }
  return o;
}

Outcome criterion_5() {
  Outcome o;
  const auto result = riverswim_result({AgentKind::ets, AgentKind::dspsrl}, {DeltaSchedule::constant(0.05)});
  for (std::size_t s0 : {1, 3})
    for (double th : {0.5, 0.9}) {
      const auto v = river_variant(s0, th);
      const double ets = result.table.find("ets:const:0.05", v, "theta_abs_err").stat.mean;
      const double ds = result.table.find("dspsrl", v, "theta_abs_err").stat.mean;
      o.check(ets < ds, v + " ets " + fmt(ets) + " < dspsrl " + fmt(ds));
    }
  return o;
}

Outcome criterion_6() {
  Outcome o;
  auto c = ExperimentConfig::defaults(Scenario::glucose, false);
  c.agents = {AgentKind::gold, AgentKind::ets, AgentKind::naive_fqi};
  c.deltas = {DeltaSchedule::constant(0.05)};
  c.horizons = {30};
  c.n_patients = 20;
  c.n_runs = 10;
  c.jobs = g_jobs;
  const auto result = run_experiment(c);
  const auto& gold = result.table.find("gold", "T=30", "cum_reward").stat;
  const auto& ets = result.table.find("ets:const:0.05", "T=30", "cum_reward").stat;
  const auto& naive = result.table.find("naive_fqi", "T=30", "cum_reward").stat;
  o.check(gold.mean > ets.mean, "gold " + fmt(gold.mean) + " > ets " + fmt(ets.mean));
  o.check(gold.mean > naive.mean, "gold " + fmt(gold.mean) + " > naive " + fmt(naive.mean));
  o.check(ets.mean >= naive.mean - naive.stderr_,
          "ets " + fmt(ets.mean) + " >= naive - se " + fmt(naive.mean - naive.stderr_));
  return o;
}

Outcome criterion_7() {
  Outcome o;
  {
    const auto prior = GridPosterior::uniform(1, 1024);
    RngStream r(7001, 1);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      SufficientCounts counts(1);
      const auto s = r.uniform_index(3000), f = r.uniform_index(3000);
      counts.add(0, true, s);
      counts.add(0, false, f);
      const auto post = grid_update(prior, counts);
      const auto expect = oracle::truncated_beta(post.grid(0).points, s, f);
      for (std::size_t i = 0; i < expect.size(); ++i)
        worst = std::max(worst, std::abs(post.probabilities()[i] - expect[i]));
    }
    o.check(worst < kBetaOracleTol, "grid vs truncated Beta max error " + fmt(worst, 3));
  }
  {
    const auto m = toy_model(ToyParams(0.2, 0.4), 0.25);
    const auto best = oracle::enumerate_two_state(m);
    const auto vi = value_iteration(m);
    const bool same = vi.policy.action(0) == best.policy[0] && vi.policy.action(1) == best.policy[1];
    const double gap = std::max(std::abs(vi.values[0] - best.values[0]), std::abs(vi.values[1] - best.values[1]));
    o.check(same && gap < kEnumerationValueTol, std::string("VI vs enumeration policy ") + (same ? "match" : "mismatch") +
                                                    ", value gap " + fmt(gap, 3));
  }
  {
    RngStream r(7002, 1);
    Eigen::MatrixXd X(400, 9);
    Eigen::VectorXd y(400);
    for (int i = 0; i < 400; ++i) {
      for (int j = 0; j < 9; ++j) X(i, j) = j == 0 ? 1.0 : 50.0 * r.normal();
      y(i) = 3.0 + 0.5 * X(i, 1) + 5.0 * r.normal();
    }
    const auto prior = GaussianPosterior::isotropic(9, 0.25, 5.0);
    const auto batch = blr_update(prior, X, y);
    auto seq = prior;
    for (int i = 0; i < 400; ++i) seq = blr_update(seq, X.row(i), y.segment(i, 1));
    const double dm = (batch.mean() - seq.mean()).cwiseAbs().maxCoeff();
    const double dc = (batch.covariance() - seq.covariance()).cwiseAbs().maxCoeff();
    o.check(std::max(dm, dc) < kBlrTol, "BLR batch vs sequential " + fmt(std::max(dm, dc), 3));
  }
  {
    const auto m = toy_model(ToyParams(0.2, 0.4), 0.25);
    const double exact = policy_evaluation(m, Policy::uniform(2, 2))[0];
    const auto mc = oracle::uniform_policy_return(m, 0, 1000000, 40, 7003);
    const double z = std::abs(mc.mean - exact) / mc.stderr_;
    o.check(z <= kMonteCarloSe, "policy evaluation vs Monte Carlo |z| = " + fmt(z, 3));
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_8() {
  Outcome o;
  {
    RngStream r(8001, 1);
    double worst = 0.0;
    const auto one = GridPosterior::uniform(1, 1024);
    const auto two = GridPosterior::uniform(2, 256);
    for (int rep = 0; rep < 50; ++rep) {
      const auto& prior = rep % 2 == 0 ? one : two;
      SufficientCounts counts(prior.dims());
      for (std::size_t d = 0; d < prior.dims(); ++d) {
        counts.add(d, true, r.uniform_index(20000));
        counts.add(d, false, r.uniform_index(20000));
      }
      const auto post = grid_update(prior, counts);
      double total = 0.0;
      for (double p : post.probabilities()) total += p;
      worst = std::max(worst, std::abs(total - 1.0));
    }
    o.check(worst <= kNormalizationTol, "posterior normalization error " + fmt(worst, 3));
  }
  {
    RngStream r(8002, 1);
    bool range = true, sym = true, tri = true;
    auto draw = [&](std::size_t n) {
      std::vector<double> p(n);
      double z = 0.0;
      for (auto& x : p) z += x = -std::log(1.0 - r.uniform());
      for (auto& x : p) x /= z;
      return p;
    };
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 2 + r.uniform_index(6);
      const auto p = draw(n), q = draw(n), s = draw(n);
      const double pq = hellinger_sq(p, q), qs = hellinger_sq(q, s), ps = hellinger_sq(p, s);
      for (double h : {pq, qs, ps}) range = range && h >= 0.0 && h <= 2.0;
      sym = sym && pq == hellinger_sq(q, p);
      tri = tri && std::sqrt(ps) <= std::sqrt(pq) + std::sqrt(qs) + kTriangleSlack;
    }
    o.check(range && sym && tri, std::string("Hellinger on 1000 triples: range ") + (range ? "ok" : "violated") +
                                     ", symmetry " + (sym ? "ok" : "violated") + ", triangle " +
                                     (tri ? "ok" : "violated"));
  }
  {
    // Every model a finite agent can plan for is a grid cell of its family.
    std::size_t calls = 0;
    double worst = 0.0;
    auto sweep = [&](const ParametricMdp& fam, const GridPosterior& shape) {
      for (std::size_t cell = 0; cell < shape.size(); ++cell) {
        const auto m = fam.model(shape.point(cell));
        const auto res = value_iteration(m);
        const auto tv = bellman_backup(m, res.values);
        double r = res.residual;
        for (std::size_t s = 0; s < tv.size(); ++s) r = std::max(r, std::abs(tv[s] - res.values[s]));
        worst = std::max(worst, r);
        ++calls;
      }
    };
    sweep(toy_family(0.25), GridPosterior::uniform(2, 256));
    sweep(riverswim_family(0.99), GridPosterior::uniform(1, 1024));
    o.check(worst <= kDefaultPlanTolerance,
            "max Bellman residual over " + std::to_string(calls) + " planner calls " + fmt(worst, 3));
  }
  {
    const auto fam = riverswim_family(0.99);
    const auto shape = GridPosterior::uniform(1, 1024);
    auto plans = std::make_shared<PlanCache>(fam, shape);
    const auto truth = riverswim_model(RiverSwimParams(0.5), 0.99);
    for (double delta : {0.05, 0.3}) {
      EpsilonGreedyTs agent(fam, shape, plans, AgentStreams::for_run(8003, 0), DeltaSchedule::constant(delta));
      RngStream env(8003, 9);
      std::size_t s = 0;
      for (std::size_t t = 0; t < 10000; ++t) {
        const auto a = agent.act(s, t);
        const auto step = step_finite(truth, s, a, env);
        agent.observe(s, a, step.next_state);
        s = step.next_state;
      }
      const double freq = static_cast<double>(agent.explorations()) / 10000.0;
      o.check(std::abs(freq - delta) <= kExplorationTol,
              "exploration frequency " + fmt(freq) + " vs delta " + fmt(delta));
    }
  }
  {
    const auto base = fs::temp_directory_path() / "bayesrl_acceptance_rerun";
    bool identical = true;
    std::size_t files = 0;
    for (auto sc : {Scenario::toy, Scenario::riverswim, Scenario::glucose}) {
      auto c = ExperimentConfig::defaults(sc, false);
      c.n_runs = 2;
      c.jobs = g_jobs;
      if (sc == Scenario::toy) c.horizons = {300};
      if (sc == Scenario::riverswim) c.horizons = {1000};
      if (sc == Scenario::glucose) {
        c.horizons = {5, 8};
        c.n_patients = 4;
        c.cohort.dataset.n_tuples = 300;
        c.cohort.fqi.regressor.n_trees = 5;
        c.cohort.naive_min_tuples = 10;
      }
      fs::remove_all(base);
      write_outputs(run_experiment(c), base / "a");
      write_outputs(run_experiment(c), base / "b");
      for (const auto& entry : fs::directory_iterator(base / "a")) {
        ++files;
        const auto other = base / "b" / entry.path().filename();
        identical = identical && fs::exists(other) && slurp(entry.path()) == slurp(other);
      }
    }
    fs::remove_all(base);
    o.check(identical && files > 0, "byte-identical reruns across " + std::to_string(files) + " output files");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::vector<int> selected;
  g_jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("criteria", selected, "Criteria to run (1-8); all when omitted")->check(CLI::Range(1, 8));
  app.add_option("--jobs", g_jobs, "Worker threads for the Monte-Carlo runs")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                       criterion_5, criterion_6, criterion_7, criterion_8};
  bool all = true;
  for (int k : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s (%s) [%.1fs]\n", k, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
