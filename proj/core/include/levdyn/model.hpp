#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "levdyn/errors.hpp"

namespace levdyn {

/// Market-wide constants: VaR multiplier alpha, liquidity gamma and the
/// aggregated exogenous return variance Sigma_eps over one slow period.
struct MarketParams {
  double alpha = 1.64;
  double gamma = 100.0;
  double sigma_eps_sq = 0.0015 * 0.0015;

  static MarketParams standard() { return {}; }

  void validate() const;

  /// Upper bound 1 + gamma shared by leverages and the mean field.
  double cap() const { return 1.0 + gamma; }

  /// alpha^2 gamma^2 Sigma_eps, the numerator of the endogenous kernel.
  double kernel_scale() const { return alpha * alpha * gamma * gamma * sigma_eps_sq; }
};

/// Full parameter set for N banks trading one asset.
struct ModelParams {
  MarketParams market;
  std::vector<double> omegas;  // memory weights, one per bank
  std::vector<double> pis;     // asset-weight fractions, summing to one

  std::size_t n_banks() const { return omegas.size(); }

  void validate() const;

  static ModelParams single(double omega, const MarketParams& market = {});
  static ModelParams pair(double omega1, double omega2, double pi1,
                          const MarketParams& market = {});
};

inline constexpr double kWeightSumTolerance = 1e-12;

struct LeverageState {
  std::vector<double> lambdas;
  double mean_field = 0.0;
  Constraint violated = Constraint::none;

  bool feasible() const { return violated == Constraint::none; }
  std::size_t size() const { return lambdas.size(); }

  /// Builds a state with the cached mean field and feasibility status.
  static LeverageState make(std::vector<double> lambdas, const ModelParams& params);
};

Constraint check_constraints(std::span<const double> lambdas, double mean_field,
                             const MarketParams& market);

double mean_field(std::span<const double> lambdas, std::span<const double> pis);

/// A(lambda) = gamma^2 alpha^2 Sigma_eps / (1 + gamma - lambda)^2.
double endogenous_kernel(double lambda, const MarketParams& market);

/// phi = (m - 1) / gamma, the intraday AR(1) coefficient for mean field m.
double ar_coefficient(double mean_field, const MarketParams& market);

/// lambda* = (1 + gamma) / (1 + gamma alpha sqrt(Sigma_eps)); fixed by every
/// eval_coupled configuration.
double common_fixed_point(const MarketParams& market);

/// Interior critical point of T for 0 < omega < 1.
double critical_point(double omega, const MarketParams& market);

/// Largest value T attains on (0, 1 + gamma).
double max_image(double omega, const MarketParams& market);

// Single-bank map T and its slope. Domain is (0, 1 + gamma).
double eval_T(double x, double omega, const MarketParams& market);
double eval_T_prime(double x, double omega, const MarketParams& market);

/// One step of the mean-field coupled map.
LeverageState eval_coupled(const LeverageState& state, const ModelParams& params);

/// Jacobian of eval_coupled at `state`, entry (i, j) = d lambda_i' / d lambda_j.
Eigen::MatrixXd eval_jacobian(const LeverageState& state, const ModelParams& params);

/// Fiber map f_y(x) of the forced bank when the forcing bank sits at y.
double eval_fiber_map(double x, double y, double omega1, const MarketParams& market);

/// f_y'(x) = omega1 (f_y(x) / x)^3.
double eval_fiber_slope(double x, double y, double omega1, const MarketParams& market);

}  // namespace levdyn
