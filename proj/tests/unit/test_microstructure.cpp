#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "levdyn/microstructure.hpp"
#include "oracles.hpp"

using namespace levdyn;

namespace {

MicroParams micro(ModelParams base, std::size_t n, std::size_t horizon, std::uint64_t seed) {
  MicroParams m;
  m.base = std::move(base);
  m.n_intraday = n;
  m.horizon = horizon;
  m.rng_seed = seed;
  return m;
}

}  // namespace

TEST(MicroParams, StepVarianceAggregates) {
  for (std::size_t n : {2u, 10u, 1000u, 12345u}) {
    const auto m = micro(ModelParams::single(0.5), n, 5, 0);
    EXPECT_NEAR(m.sigma_eps_step_sq() * double(n), m.base.market.sigma_eps_sq, 1e-12);
  }
  auto bad = micro(ModelParams::single(0.5), 1, 5, 0);
  EXPECT_THROW(bad.validate(), ParamError);
}

TEST(MicroState, InitialBalanceSheets) {
  const auto m = micro(ModelParams::pair(0.5, 0.3, 0.3), 100, 5, 0);
  const std::vector<double> lam{20.0, 60.0};
  const auto s = initial_micro_state(m, lam);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(s.target_assets[i], s.lambdas[i] * s.equities[i]);
    EXPECT_NEAR(s.weights[i], m.base.pis[i], 1e-15);
    EXPECT_NEAR(s.sigma_e_sq[i], 1.0 / std::pow(1.64 * lam[i], 2), 1e-18);
  }
  EXPECT_THROW(initial_micro_state(m, std::vector<double>{0.5, 10.0}), InfeasibleStateError);
  EXPECT_THROW(initial_micro_state(m, lam, std::vector<double>{1.0, -1.0}), InsolvencyError);
}

TEST(StepIntraday, ZeroNoiseZeroReturnIsStationary) {
  auto m = micro(ModelParams::pair(0.5, 0.3, 0.5), 100, 5, 0);
  m.zero_noise = true;
  const auto s = initial_micro_state(m, std::vector<double>{20.0, 60.0});
  Rng rng(1);
  const auto next = step_intraday(s, m, rng);
  EXPECT_EQ(next.equities, s.equities);
  EXPECT_EQ(next.target_assets, s.target_assets);
  EXPECT_EQ(next.last_return, 0.0);
}

TEST(StepIntraday, UnitLeverageGivesWhiteNoise) {
  const auto m = micro(ModelParams::single(0.5), 100, 5, 0);
  auto s = initial_micro_state(m, std::vector<double>{1.0});
  EXPECT_EQ(intraday_ar_coefficient(s, m), 0.0);
  Rng rng(3), twin(3);
  for (int k = 0; k < 50; ++k) {
    const double r = advance_intraday(s, m, rng);
    // one fresh distribution per tick, as in the simulator
    std::normal_distribution<double> noise(0.0, std::sqrt(m.sigma_eps_step_sq()));
    EXPECT_EQ(r, noise(twin));
  }
}

TEST(StepIntraday, EqualLeveragesKeepWeights) {
  ModelParams p;
  p.omegas = {0.3, 0.6, 0.9};
  p.pis = {0.2, 0.3, 0.5};
  const auto m = micro(p, 1000, 5, 0);
  auto s = initial_micro_state(m, std::vector<double>{40.0, 40.0, 40.0});
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    advance_intraday(s, m, rng);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.weights[i], p.pis[i], 1e-12);
  }
}

TEST(StepIntraday, WeightsSumToOneAndBalanceSheetsHold) {
  ModelParams p;
  p.omegas = {0.3, 0.6, 0.9};
  p.pis = {0.2, 0.3, 0.5};
  const auto m = micro(p, 1000, 5, 0);
  auto s = initial_micro_state(m, std::vector<double>{10.0, 40.0, 90.0});
  Rng rng(6);
  for (int k = 0; k < 1000; ++k) {
    advance_intraday(s, m, rng);
    EXPECT_NEAR(std::accumulate(s.weights.begin(), s.weights.end(), 0.0), 1.0, 1e-12);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.target_assets[i], s.lambdas[i] * s.equities[i]);
  }
  EXPECT_GT(s.pi_drift_max, 0.0);
  EXPECT_LT(s.pi_drift_max, 0.5);
}

TEST(StepIntraday, DriftScalesWithNoiseLevel) {
  ModelParams p;
  p.omegas = {0.3, 0.6, 0.9};
  p.pis = {0.2, 0.3, 0.5};
  auto drift = [&](double scale) {
    auto q = p;
    q.market.sigma_eps_sq *= scale * scale;
    const auto m = micro(q, 1000, 5, 0);
    auto s = initial_micro_state(m, std::vector<double>{10.0, 40.0, 90.0});
    Rng rng(6);
    for (int k = 0; k < 1000; ++k) advance_intraday(s, m, rng);
    return s.pi_drift_max;
  };
  // same draws, noise scaled by 1/10: drift is first order in the noise
  EXPECT_NEAR(drift(0.1) / drift(1.0), 0.1, 0.03);
  EXPECT_NEAR(drift(0.01) / drift(0.1), 0.1, 0.003);
}

TEST(StepIntraday, InsolvencyAborts) {
  ModelParams p = ModelParams::single(0.5);
  p.market.sigma_eps_sq = 1.0;
  const auto m = micro(p, 2, 5, 0);
  auto s = initial_micro_state(m, std::vector<double>{50.0});
  Rng rng(7);
  EXPECT_THROW(
      {
        for (int k = 0; k < 10000; ++k) advance_intraday(s, m, rng);
      },
      InsolvencyError);
}

TEST(ClosePeriod, ConsistentOnSyntheticAr1) {
  std::mt19937_64 rng(11);
  const std::vector<double> sig{1e-4}, om{0.5};
  for (double phi : {-0.3, 0.0, 0.4, 0.8}) {
    double r0 = 0.0;
    const double var = 2.25e-9;
    const auto path = oracle::ar1_path(phi, var, 1000000, rng, &r0);
    const auto c = close_period(path, r0, sig, om, MarketParams{});
    EXPECT_NEAR(c.phi_hat, phi, 5e-3);
    EXPECT_NEAR(c.sigma_eps_hat_sq, var, 0.01 * var);
    EXPECT_NEAR(c.sigma_e_hat_sq, 1e6 * c.sigma_eps_hat_sq / std::pow(1.0 - c.phi_hat, 2),
                1e-12 * c.sigma_e_hat_sq);
  }
}

TEST(ClosePeriod, FullMemoryAndDegenerateInput) {
  const std::vector<double> sig{1e-4, 2e-4}, full{1.0, 1.0};
  std::vector<double> returns(100, 0.0);
  const auto c = close_period(returns, 0.0, sig, full, MarketParams{});
  EXPECT_EQ(c.sigma_e_sq, sig);
  EXPECT_NEAR(c.lambdas[0], 1.0 / (1.64 * 1e-2), 1e-12);
  EXPECT_EQ(c.phi_hat, 0.0);
  EXPECT_EQ(c.sigma_eps_hat_sq, 0.0);
  EXPECT_EQ(c.sigma_e_hat_sq, 0.0);
  EXPECT_FALSE(c.floored);

  const std::vector<double> none{0.0, 0.0};
  const auto z = close_period(returns, 0.0, sig, none, MarketParams{});
  EXPECT_TRUE(z.floored);
  EXPECT_EQ(z.sigma_e_sq[0], kSigmaFloor);
  EXPECT_TRUE(std::isfinite(z.lambdas[0]));
}

TEST(ClosePeriod, ExplosiveReturnsRejected) {
  std::vector<double> r{1.0};
  for (int k = 0; k < 50; ++k) r.push_back(1.5 * r.back());
  const std::vector<double> sig{1e-4}, om{0.5};
  EXPECT_THROW(close_period(r, 1.0 / 1.5, sig, om, MarketParams{}), NonstationarityError);
}

TEST(RunMicro, DeterministicLimitReproducesCoupledMap) {
  auto m = micro(ModelParams::pair(0.7, 0.9, 0.4), 50, 100, 1);
  m.zero_noise = true;
  m.variance = VarianceMode::analytic;
  m.weights = WeightMode::configured;
  const auto run = run_micro(m, std::vector<double>{30.0, 70.0});
  ASSERT_EQ(run.stochastic.size(), 101u);
  for (std::size_t t = 0; t <= 100; ++t)
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_NEAR(run.stochastic[t][i], run.deterministic[t][i], 1e-10) << t;
}

TEST(RunMicro, EqualMemorySharesVariance) {
  ModelParams p;
  p.omegas = {0.8, 0.8, 0.8};
  p.pis = {0.2, 0.3, 0.5};
  const auto m = micro(p, 200, 30, 9);
  const auto same = run_micro(m, std::vector<double>{50.0, 50.0, 50.0});
  for (const auto& row : same.stochastic) {
    EXPECT_EQ(row[0], row[1]);
    EXPECT_EQ(row[1], row[2]);
  }
  const auto diff = run_micro(m, std::vector<double>{30.0, 50.0, 70.0});
  auto gap = [&](std::size_t t) {
    return 1.0 / std::pow(diff.stochastic[t][0], 2) - 1.0 / std::pow(diff.stochastic[t][2], 2);
  };
  for (std::size_t t = 1; t <= 30; ++t)
    EXPECT_NEAR(gap(t), std::pow(0.8, double(t)) * gap(0), 1e-9 * std::abs(gap(0)));
}

TEST(RunMicro, FluctuationsShrinkWithIntradaySteps) {
  double prev = 1e9;
  for (std::size_t n : {100u, 10000u}) {
    double acc = 0.0;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const auto run = run_micro(micro(ModelParams::single(0.8), n, 50, 100 + rep),
                                 std::vector<double>{70.0});
      acc += rms_deviation(run);
    }
    EXPECT_LT(acc, prev);
    prev = acc;
  }
}

TEST(RunMicro, ReproducibleAndDriftReported) {
  const auto m = micro(ModelParams::pair(0.5, 0.3, 0.5), 500, 20, 4);
  const auto a = run_micro(m, std::vector<double>{40.0, 60.0});
  const auto b = run_micro(m, std::vector<double>{40.0, 60.0});
  EXPECT_EQ(a.stochastic, b.stochastic);
  EXPECT_EQ(a.phi_hat.size(), 21u);
  EXPECT_TRUE(std::isnan(a.phi_hat[0]));
  double worst = 0.0;
  for (double d : a.pi_drift_max) worst = std::max(worst, d);
  EXPECT_GT(worst, 0.0);
  EXPECT_LT(worst, 1.0);
}
