#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "levdyn/model.hpp"
#include "levdyn/random.hpp"

namespace levdyn {

/// Weights entering the intraday AR(1) coefficient: the actual balance-sheet
/// shares A*_i / sum A*, or the configured constant pis.
enum class WeightMode { tracked, configured };

/// Aggregated variance fed to the leverage rule: estimated from the simulated
/// returns, or the analytic large-n value Sigma_eps / (1 - phi)^2.
enum class VarianceMode { estimated, analytic };

inline constexpr double kSigmaFloor = 1e-18;

struct MicroParams {
  ModelParams base;
  std::size_t n_intraday = 1000;
  std::size_t horizon = 50;
  std::uint64_t rng_seed = 0;
  double equity_total = 1.0;
  WeightMode weights = WeightMode::tracked;
  VarianceMode variance = VarianceMode::estimated;
  bool zero_noise = false;

  /// Per-tick exogenous variance Sigma_eps / n.
  double sigma_eps_step_sq() const {
    return base.market.sigma_eps_sq / static_cast<double>(n_intraday);
  }

  void validate() const;
};

/// Intraday market state within one slow period.
struct MicroState {
  std::vector<double> equities;
  std::vector<double> target_assets;  // A*_i = lambda_i E_i
  std::vector<double> lambdas;        // targets fixed for the period
  std::vector<double> sigma_e_sq;     // per-bank variance estimates
  std::vector<double> weights;        // pi_{i,s} = A*_i / sum_a A*_a
  std::vector<double> period_start_weights;
  double last_return = 0.0;
  double pi_drift_max = 0.0;  // max |pi_{i,s} - pi_{i,start}| this period
  std::size_t period = 0;
};

/// Initial balance sheets. Default equities E_i = pi_i E_total / lambda_i so
/// that initial asset shares equal the configured pis.
MicroState initial_micro_state(const MicroParams& params, std::span<const double> lambdas,
                               std::optional<std::vector<double>> equities = std::nullopt);

/// Intraday AR(1) coefficient sum (lambda_i - 1) A*_i / (gamma sum A*_i).
double intraday_ar_coefficient(const MicroState& state, const MicroParams& params);

/// Rebalance targets A*_i = lambda_i E_i and restart the period's weight drift.
void begin_period(MicroState& state);

/// One trading tick in place; returns r_s.
double advance_intraday(MicroState& state, const MicroParams& params, Rng& rng);

/// Value-returning form of advance_intraday.
MicroState step_intraday(const MicroState& state, const MicroParams& params, Rng& rng);

struct PeriodClose {
  double phi_hat = 0.0;
  double sigma_eps_hat_sq = 0.0;  // per-tick innovation variance estimate
  double sigma_e_hat_sq = 0.0;    // aggregated n sigma_eps^2 / (1 - phi)^2
  std::vector<double> sigma_e_sq;
  std::vector<double> lambdas;
  bool floored = false;
};

/// Conditional least-squares AR(1) fit of one period's returns (r_before is
/// the return preceding the first tick), variance update and VaR leverage rule.
PeriodClose close_period(std::span<const double> returns, double r_before,
                         std::span<const double> sigma_e_sq, std::span<const double> omegas,
                         const MarketParams& market);

/// Leverage update from a given aggregated variance (analytic mode).
PeriodClose close_period_with_variance(double sigma_e_hat_sq, double phi,
                                       std::span<const double> sigma_e_sq,
                                       std::span<const double> omegas,
                                       const MarketParams& market);

struct MicroRun {
  // [period][bank], period 0 is the initial condition
  std::vector<std::vector<double>> stochastic;
  std::vector<std::vector<double>> deterministic;
  std::vector<double> pi_drift_max;  // per period, 0 at period 0
  std::vector<double> phi_hat;
  std::vector<double> sigma_hat_sq;  // aggregated variance estimate per period
  bool floored = false;
};

/// Full slow-fast simulation with a deterministic comparison path of the
/// coupled map started from the same leverages.
MicroRun run_micro(const MicroParams& params, std::span<const double> initial_lambdas,
                   std::optional<std::vector<double>> equities = std::nullopt);

/// RMS of stochastic - deterministic leverage over periods 1..horizon and banks.
double rms_deviation(const MicroRun& run);

}  // namespace levdyn
