#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bayesrl/environments.hpp"
#include "bayesrl/errors.hpp"
#include "bayesrl/metrics.hpp"
#include "bayesrl/planning.hpp"
#include "bayesrl/rng.hpp"
#include "oracles.hpp"

using namespace bayesrl;

namespace {

std::vector<double> random_distribution(std::size_t n, RngStream& rng) {
  std::vector<double> p(n);
  for (auto& x : p) x = -std::log(1.0 - rng.uniform());
  const double z = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= z;
  return p;
}

}  // namespace

TEST(Hellinger, KnownValues) {
  const std::vector<double> p{0.3, 0.7}, a{1, 0}, b{0, 1};
  EXPECT_EQ(hellinger_sq(p, p), 0.0);
  EXPECT_NEAR(hellinger_sq(a, b), 2.0, 1e-15);
  const std::vector<double> b2{0.2, 0.8}, b4{0.4, 0.6};
  EXPECT_NEAR(hellinger_sq(b2, b4), 0.048673, 1e-6);
}

TEST(Hellinger, RejectsBadInput) {
  const std::vector<double> two{0.5, 0.5}, three{0.2, 0.3, 0.5}, bad{0.5, 0.6};
  EXPECT_THROW(hellinger_sq(two, three), DomainError);
  EXPECT_THROW(hellinger_sq(two, bad), DomainError);
}

TEST(Hellinger, RangeSymmetryTriangleOnRandomTriples) {
  RngStream rng(11, 3);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + rng.uniform_index(6);
    const auto p = random_distribution(n, rng), q = random_distribution(n, rng), r = random_distribution(n, rng);
    const double pq = hellinger_sq(p, q), qr = hellinger_sq(q, r), pr = hellinger_sq(p, r);
    for (double h : {pq, qr, pr}) {
      EXPECT_GE(h, 0.0);
      EXPECT_LE(h, 2.0);
    }
    EXPECT_NEAR(pq, hellinger_sq(q, p), 1e-15);
    EXPECT_LE(std::sqrt(pr), std::sqrt(pq) + std::sqrt(qr) + 1e-12);
  }
}

TEST(DMu, ToyExample) {
  const auto fam = toy_family(0.25);
  const auto w = uniform_weights(fam);
  ASSERT_EQ(w.size(), 4u);
  const std::vector<double> t{0.2, 0.4}, tp{0.4, 0.4};
  EXPECT_EQ(d_mu(fam, t, t, w), 0.0);
  EXPECT_NEAR(d_mu(fam, t, tp, w), 0.15600, 1e-4);
  EXPECT_NEAR(d_mu(fam, t, tp, w), std::sqrt(2 * 0.0486739 / 4), 1e-6);
  const std::vector<double> zero(4, 0.0);
  EXPECT_EQ(d_mu(fam, t, tp, zero), 0.0);
  const std::vector<double> neg{0.25, -0.25, 0.25, 0.25};
  EXPECT_THROW(d_mu(fam, t, tp, neg), DomainError);
}

TEST(DMu, TriangleInequality) {
  RngStream rng(12, 3);
  for (const auto& fam : {toy_family(0.25), riverswim_family(0.99)}) {
    const auto w = uniform_weights(fam);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> a(fam.n_params()), b(fam.n_params()), c(fam.n_params());
      for (std::size_t d = 0; d < fam.n_params(); ++d) {
        a[d] = 0.01 + 0.98 * rng.uniform();
        b[d] = 0.01 + 0.98 * rng.uniform();
        c[d] = 0.01 + 0.98 * rng.uniform();
      }
      EXPECT_LE(d_mu(fam, a, c, w), d_mu(fam, a, b, w) + d_mu(fam, b, c, w) + 1e-12);
      EXPECT_NEAR(d_mu(fam, a, b, w), d_mu(fam, b, a, w), 1e-15);
    }
  }
}

TEST(Regret, ZeroAtTruth) {
  const std::vector<double> th{0.2, 0.4};
  const auto q = regret_quantities(toy_family(0.25), th, th, 0);
  EXPECT_EQ(q.v_error, 0.0);
  EXPECT_EQ(q.regret, 0.0);
}

TEST(Regret, NonNegativeOnRandomDraws) {
  RngStream rng(13, 3);
  const auto toy = toy_family(0.25);
  const auto river = riverswim_family(0.99);
  const std::vector<double> toy0{0.2, 0.4}, river0{0.9};
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> t{0.01 + 0.98 * rng.uniform(), 0.01 + 0.98 * rng.uniform()};
    ASSERT_GE(regret_quantities(toy, t, toy0, 0).regret, 0.0);
    if (i % 10 == 0) {
      const std::vector<double> r{0.01 + 0.98 * rng.uniform()};
      ASSERT_GE(regret_quantities(river, r, river0, 2).regret, 0.0);
    }
  }
}

TEST(Regret, MatchesPolicyEnumeration) {
  // A theta with a different optimal policy from theta0 under gamma = 0.9.
  const double gamma = 0.9;
  const auto fam = toy_family(gamma);
  const std::vector<double> th0{0.2, 0.4};
  RngStream rng(14, 3);
  int distinct = 0;
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> th{0.01 + 0.98 * rng.uniform(), 0.01 + 0.98 * rng.uniform()};
    const auto m = fam.model(th), m0 = fam.model(th0);
    const auto pi = oracle::enumerate_two_state(m).policy, pi0 = oracle::enumerate_two_state(m0).policy;
    distinct += pi != pi0;
    const double expected_regret = std::abs(oracle::two_state_value(m0, pi)[0] - oracle::two_state_value(m0, pi0)[0]);
    const double expected_verr = std::abs(oracle::two_state_value(m, pi)[0] - oracle::two_state_value(m0, pi0)[0]);
    const auto q = regret_quantities(fam, th, th0, 0);
    EXPECT_NEAR(q.regret, expected_regret, 1e-8);
    EXPECT_NEAR(q.v_error, expected_verr, 1e-8);
  }
  EXPECT_GT(distinct, 0);
}

TEST(Regret, EvaluatorMatchesDirectComputation) {
  const auto fam = riverswim_family(0.99);
  const auto shape = GridPosterior::uniform(1, 64);
  auto cache = std::make_shared<PlanCache>(fam, shape);
  const std::vector<double> th0{0.5};
  RegretEvaluator eval(cache, th0, 0);
  for (std::size_t cell = 0; cell < 64; cell += 3) {
    const auto a = eval.evaluate(cell);
    const auto b = regret_quantities(fam, shape.point(cell), th0, 0);
    EXPECT_NEAR(a.regret, b.regret, 1e-8);
    EXPECT_NEAR(a.v_error, b.v_error, 1e-8);
  }
}

TEST(OptimalActionProportion, Extremes) {
  const auto pi = Policy::deterministic({1, 0}, 2);
  Trajectory good(0), bad(0), empty(0);
  for (int i = 0; i < 10; ++i) {
    const std::size_t s = static_cast<std::size_t>(i % 2);
    good.record(pi.action(s), 0.0, 1 - s);
    bad.record(1 - pi.action(s), 0.0, 1 - s);
  }
  EXPECT_EQ(optimal_action_proportion(good, pi), 1.0);
  EXPECT_EQ(optimal_action_proportion(bad, pi), 0.0);
  EXPECT_EQ(optimal_action_proportion(empty, pi), 0.0);
  EXPECT_THROW(optimal_action_proportion(good, Policy::uniform(2, 2)), StateError);
}

TEST(ParamL2, Examples) {
  const std::vector<double> a{0.2, 0.4}, b{0.4, 0.4}, z{0, 0}, c{0.3, 0.4};
  EXPECT_EQ(param_l2_error(a, a), 0.0);
  EXPECT_NEAR(param_l2_error(a, b), 0.2, 1e-15);
  EXPECT_NEAR(param_l2_error(z, c), 0.5, 1e-15);
}

TEST(LogLogSlope, PowerLaws) {
  std::vector<std::size_t> t;
  std::vector<double> half, quarter, flat;
  for (std::size_t i = 1; i <= 2000; ++i) {
    t.push_back(i);
    half.push_back(std::pow(static_cast<double>(i), -0.5));
    quarter.push_back(3.0 * std::pow(static_cast<double>(i), -0.25));
    flat.push_back(0.7);
  }
  EXPECT_NEAR(loglog_slope(t, half, 200), -0.5, 1e-9);
  EXPECT_NEAR(loglog_slope(t, quarter, 200), -0.25, 1e-9);
  EXPECT_NEAR(loglog_slope(t, flat, 200), 0.0, 1e-12);
  flat[500] = 0.0;
  EXPECT_THROW(loglog_slope(t, flat, 200), DomainError);
  EXPECT_NO_THROW(loglog_slope(t, flat, 600));
  EXPECT_THROW(loglog_slope(t, half, 2000), DomainError);
}

TEST(MetricSeriesTest, TimesStrictlyIncrease) {
  MetricSeries s;
  s.push(1, 0.5);
  s.push(3, 0.4);
  EXPECT_THROW(s.push(3, 0.1), DomainError);
  EXPECT_EQ(s.size(), 2u);
}

TEST(MeanStderrTest, TwoPointsAndSingleRun) {
  const std::vector<double> two{0.9, 1.1}, one{0.42};
  const auto m = mean_stderr(two);
  EXPECT_NEAR(m.mean, 1.0, 1e-15);
  EXPECT_NEAR(m.stderr_, 0.1, 1e-15);
  EXPECT_EQ(m.n, 2u);
  const auto s = mean_stderr(one);
  EXPECT_EQ(s.mean, 0.42);
  EXPECT_EQ(s.stderr_, 0.0);
  EXPECT_TRUE(s.single_run);
}
