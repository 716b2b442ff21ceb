#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "levdyn/lyapunov.hpp"
#include "levdyn/orbit.hpp"
#include "levdyn/skew_product.hpp"

using namespace levdyn;

namespace {
const MarketParams kStd{};
}

TEST(Lyapunov1d, FullMemoryIsZero) {
  const auto est = lyapunov_1d(1.0, kStd, 50.0, 1000, 1000);
  EXPECT_EQ(est.top(), 0.0);
  EXPECT_FALSE(est.saturated);
}

TEST(Lyapunov1d, SignsAcrossMemory) {
  EXPECT_LT(lyapunov_1d(0.8, kStd, 50.0, 1000, 100000).top(), 0.0);
  EXPECT_GT(lyapunov_1d(0.3, kStd, 50.0, 1000, 100000).top(), 0.0);
  EXPECT_THROW(lyapunov_1d(0.05, kStd, 50.0, 1000, 100), OrbitViolationError);
  EXPECT_THROW(lyapunov_1d(0.5, kStd, 50.0, 10, 0), ParamError);
}

TEST(Lyapunov1d, ShortProtocolIsShort) {
  constexpr auto p = LyapunovProtocol::short_run();
  const auto est = lyapunov_1d(0.8, kStd, 50.0, p.transient, p.steps);
  EXPECT_EQ(est.steps_used, 100u);
  EXPECT_LT(est.top(), 0.0);
}

TEST(Lyapunov1d, SuperstablePointSaturates) {
  // walk ulps away from the critical point until the slope rounds to exactly zero
  std::optional<std::pair<double, double>> hit;  // omega, x
  for (int i = 1; i < 1000 && !hit; ++i) {
    const double omega = i / 1000.0;
    if (max_image(omega, kStd) >= 1.0 + kStd.gamma) continue;  // first image must stay feasible
    double up = critical_point(omega, kStd), down = up;
    for (int k = 0; k < 5000 && !hit; ++k) {
      if (eval_T_prime(up, omega, kStd) == 0.0) hit = {omega, up};
      if (eval_T_prime(down, omega, kStd) == 0.0) hit = {omega, down};
      up = std::nextafter(up, 200.0);
      down = std::nextafter(down, 0.0);
    }
  }
  ASSERT_TRUE(hit.has_value());
  const auto est = lyapunov_1d(hit->first, kStd, hit->second, 0, 1);
  EXPECT_TRUE(est.saturated);
  EXPECT_EQ(est.top(), kLogFloor);
}

TEST(LyapunovSpectrum, SingleBankMatchesScalar) {
  for (double w : {0.3, 0.45, 0.8}) {
    const auto p = ModelParams::single(w);
    const auto spec = lyapunov_spectrum(LeverageState::make({50.0}, p), p, 1000, 20000);
    const auto scalar = lyapunov_1d(w, kStd, 50.0, 1000, 20000);
    ASSERT_EQ(spec.exponents.size(), 1u);
    EXPECT_NEAR(spec.top(), scalar.top(), 1e-10) << w;
  }
}

TEST(LyapunovSpectrum, SkewProductSplits) {
  const auto p = ModelParams::pair(0.5, 0.3, 0.0);
  const auto spec = lyapunov_spectrum(LeverageState::make({40.0, 50.0}, p), p, 1000, 100000);
  ASSERT_EQ(spec.exponents.size(), 2u);
  const double forcing = lyapunov_1d(0.3, kStd, 50.0, 1000, 100000).top();
  EXPECT_NEAR(spec.exponents[0], forcing, 2e-2);
  EXPECT_NEAR(spec.exponents[1], std::log(0.5), 2e-2);
}

TEST(LyapunovSpectrum, AttractorIsChaoticAndStable) {
  const auto p = ModelParams::pair(0.5, 0.3, 0.5);
  const auto a = lyapunov_spectrum(LeverageState::make({40.0, 50.0}, p), p, 1000, 100000);
  const auto b =
      lyapunov_spectrum(LeverageState::make({40.0 + 1e-6, 50.0}, p), p, 1000, 100000);
  ASSERT_EQ(a.exponents.size(), 2u);
  EXPECT_GT(a.top(), 0.0);
  EXPECT_GE(a.exponents[0], a.exponents[1]);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_TRUE(std::isfinite(a.exponents[i]));
    EXPECT_NEAR(a.exponents[i], b.exponents[i], 5e-2);
  }
}

TEST(LyapunovSpectrum, ReorthonormalisationIntervalDoesNotMatter) {
  const auto p = ModelParams::pair(0.5, 0.3, 0.5);
  const auto s = LeverageState::make({40.0, 50.0}, p);
  const auto a = lyapunov_spectrum(s, p, 1000, 20000, 1);
  const auto b = lyapunov_spectrum(s, p, 1000, 20000, 5);
  EXPECT_NEAR(a.exponents[0], b.exponents[0], 1e-8);
  EXPECT_NEAR(a.exponents[1], b.exponents[1], 1e-8);
}

TEST(FiberExponent, TelescopingBound) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u1(0.05, 0.95), u2(0.3, 1.0), ux(1.0, 100.0);
  const std::size_t steps = 20000;
  for (int k = 0; k < 20; ++k) {
    const double w1 = u1(rng), w2 = u2(rng);
    const auto h = make_forcing_history(w2, kStd, 50.0, 1000, 0, steps);
    const double x0 = ux(rng);
    const auto fe = fiber_exponent(h.orbit, w1, kStd, x0, steps);
    EXPECT_LT(fe.value, 0.0);
    EXPECT_NEAR(fe.value, std::log(w1), 3.0 / steps * std::log(101.0) + 1e-12);
    const double identity =
        static_cast<double>(steps) * std::log(w1) + 3.0 * std::log(fe.x_final / fe.x_initial);
    EXPECT_NEAR(fe.log_product, identity, 1e-8 * std::abs(identity));
  }
}

TEST(FiberExponent, EdgeMemories) {
  const auto h = make_forcing_history(0.3, kStd, 50.0, 1000, 0, 1000);
  EXPECT_EQ(fiber_exponent(h.orbit, 1.0, kStd, 20.0, 1000).value, 0.0);
  const auto zero = fiber_exponent(h.orbit, 0.0, kStd, 20.0, 1000);
  EXPECT_TRUE(zero.minus_infinity);
  EXPECT_TRUE(std::isinf(zero.value) && zero.value < 0);
}

TEST(LyapunovSign, MatchesPeriodDetection) {
  std::size_t feasible = 0, agree = 0;
  for (int i = 0; i < 200; ++i) {
    const double w = (i + 0.5) / 200.0;
    const auto p = ModelParams::single(w);
    const auto trace = iterate(LeverageState::make({50.0}, p), p, 1000, 800);
    if (!trace.complete()) continue;
    ++feasible;
    const bool aperiodic = !detect_period(trace).periodic();
    const bool positive = lyapunov_1d(w, kStd, 50.0, 1000, 20000).top() > 0.0;
    agree += aperiodic == positive ? 1 : 0;
  }
  ASSERT_GT(feasible, 100u);
  EXPECT_GE(static_cast<double>(agree), 0.95 * static_cast<double>(feasible));
}
