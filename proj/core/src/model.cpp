#include "levdyn/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace levdyn {

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::none: return "none";
    case Constraint::leverage_below_one: return "leverage_below_one";
    case Constraint::mean_field_above_cap: return "mean_field_above_cap";
    case Constraint::non_finite: return "non_finite";
  }
  return "unknown";
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParamError(what);
}

std::string describe(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

void MarketParams::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0, got " + describe(alpha));
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0, got " + describe(gamma));
  require(std::isfinite(sigma_eps_sq) && sigma_eps_sq > 0.0,
          "sigma_eps_sq must be > 0, got " + describe(sigma_eps_sq));
}

void ModelParams::validate() const {
  market.validate();
  require(!omegas.empty(), "omegas: at least one bank is required");
  require(omegas.size() == pis.size(),
          "omegas and pis must have the same length (" + std::to_string(omegas.size()) +
              " vs " + std::to_string(pis.size()) + ")");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    require(omegas[i] >= 0.0 && omegas[i] <= 1.0,
            "omegas[" + std::to_string(i) + "] must lie in [0, 1], got " + describe(omegas[i]));
    require(pis[i] >= 0.0 && pis[i] <= 1.0,
            "pis[" + std::to_string(i) + "] must lie in [0, 1], got " + describe(pis[i]));
  }
  const double total = std::accumulate(pis.begin(), pis.end(), 0.0);
  require(std::abs(total - 1.0) <= kWeightSumTolerance,
          "pis must sum to 1, got " + describe(total));
}

ModelParams ModelParams::single(double omega, const MarketParams& market) {
  return ModelParams{market, {omega}, {1.0}};
}

ModelParams ModelParams::pair(double omega1, double omega2, double pi1,
                              const MarketParams& market) {
  return ModelParams{market, {omega1, omega2}, {pi1, 1.0 - pi1}};
}

double mean_field(std::span<const double> lambdas, std::span<const double> pis) {
  double m = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) m += pis[i] * lambdas[i];
  return m;
}

Constraint check_constraints(std::span<const double> lambdas, double m,
                             const MarketParams& market) {
  for (double l : lambdas) {
    if (!std::isfinite(l)) return Constraint::non_finite;
  }
  if (!std::isfinite(m)) return Constraint::non_finite;
  for (double l : lambdas) {
    if (l < 1.0) return Constraint::leverage_below_one;
  }
  if (m > market.cap()) return Constraint::mean_field_above_cap;
  return Constraint::none;
}

LeverageState LeverageState::make(std::vector<double> lambdas, const ModelParams& params) {
  if (lambdas.size() != params.n_banks()) {
    throw ParamError("state has " + std::to_string(lambdas.size()) + " leverages but model has " +
                     std::to_string(params.n_banks()) + " banks");
  }
  LeverageState s;
  s.mean_field = levdyn::mean_field(lambdas, params.pis);
  s.violated = check_constraints(lambdas, s.mean_field, params.market);
  s.lambdas = std::move(lambdas);
  return s;
}

double endogenous_kernel(double lambda, const MarketParams& market) {
  const double d = market.cap() - lambda;
  return market.kernel_scale() / (d * d);
}

double ar_coefficient(double m, const MarketParams& market) {
  return (m - 1.0) / market.gamma;
}

double common_fixed_point(const MarketParams& market) {
  return market.cap() / (1.0 + market.gamma * market.alpha * std::sqrt(market.sigma_eps_sq));
}

double critical_point(double omega, const MarketParams& market) {
  if (!(omega > 0.0 && omega < 1.0)) {
    throw ParamError("critical point exists only for 0 < omega < 1");
  }
  // T' = 0  <=>  ((1 + gamma - x) / x)^3 = (1 - omega) K / omega
  const double ratio = std::cbrt((1.0 - omega) * market.kernel_scale() / omega);
  return market.cap() / (1.0 + ratio);
}

double max_image(double omega, const MarketParams& market) {
  if (omega >= 1.0) return market.cap();
  if (omega <= 0.0) return market.cap() / std::sqrt(market.kernel_scale());
  return eval_T(critical_point(omega, market), omega, market);
}

namespace {

void check_domain(double x, const MarketParams& market, const char* what) {
  if (!(x > 0.0 && x < market.cap())) {
    throw DomainError(std::string(what) + ": argument " + describe(x) +
                      " outside (0, 1 + gamma)");
  }
}

}  // namespace

double eval_T(double x, double omega, const MarketParams& market) {
  check_domain(x, market, "eval_T");
  if (omega == 1.0) return x;
  const double d = market.cap() - x;
  const double c = market.kernel_scale() / (d * d);
  return 1.0 / std::sqrt(omega / (x * x) + (1.0 - omega) * c);
}

double eval_T_prime(double x, double omega, const MarketParams& market) {
  check_domain(x, market, "eval_T_prime");
  if (omega == 1.0) return 1.0;
  const double t = eval_T(x, omega, market);
  const double d = market.cap() - x;
  const double g = market.kernel_scale() / (d * d * d);
  return t * t * t * (omega / (x * x * x) - (1.0 - omega) * g);
}

namespace {

/// mean-field denominator 1 + gamma - m, validated for a feasible state
double coupling_gap(const LeverageState& state, const ModelParams& params, const char* what) {
  if (state.size() != params.n_banks()) {
    throw ParamError(std::string(what) + ": state/model bank count mismatch");
  }
  if (!state.feasible()) {
    throw InfeasibleStateError(state.violated, std::string(what) + ": infeasible state (" +
                                                   std::string(to_string(state.violated)) + ")");
  }
  const double d = params.market.cap() - state.mean_field;
  if (!(d > 0.0)) {
    throw DomainError(std::string(what) + ": mean field " + describe(state.mean_field) +
                      " reaches 1 + gamma");
  }
  return d;
}

}  // namespace

LeverageState eval_coupled(const LeverageState& state, const ModelParams& params) {
  const double d = coupling_gap(state, params, "eval_coupled");
  const double c = params.market.kernel_scale() / (d * d);
  std::vector<double> next(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double l = state.lambdas[i];
    const double w = params.omegas[i];
    next[i] = (w == 1.0) ? l : 1.0 / std::sqrt(w / (l * l) + (1.0 - w) * c);
  }
  return LeverageState::make(std::move(next), params);
}

Eigen::MatrixXd eval_jacobian(const LeverageState& state, const ModelParams& params) {
  const double d = coupling_gap(state, params, "eval_jacobian");
  const double c = params.market.kernel_scale() / (d * d);
  const double g = params.market.kernel_scale() / (d * d * d);
  const auto n = static_cast<Eigen::Index>(state.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = state.lambdas[i];
    const double w = params.omegas[i];
    if (w == 1.0) {
      J(i, i) = 1.0;
      continue;
    }
    const double t = 1.0 / std::sqrt(w / (l * l) + (1.0 - w) * c);
    const double t3 = t * t * t;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double diag = (i == j) ? w / (l * l * l) : 0.0;
      J(i, j) = t3 * (diag - (1.0 - w) * g * params.pis[j]);
    }
  }
  return J;
}

double eval_fiber_map(double x, double y, double omega1, const MarketParams& market) {
  if (!(x > 0.0)) throw DomainError("eval_fiber_map: x = " + describe(x) + " must be > 0");
  if (!(y < market.cap())) {
    throw DomainError("eval_fiber_map: forcing y = " + describe(y) + " must be < 1 + gamma");
  }
  if (omega1 == 1.0) return x;
  const double d = market.cap() - y;
  const double c = market.kernel_scale() / (d * d);
  return 1.0 / std::sqrt(omega1 / (x * x) + (1.0 - omega1) * c);
}

double eval_fiber_slope(double x, double y, double omega1, const MarketParams& market) {
  const double f = eval_fiber_map(x, y, omega1, market);
  const double r = f / x;
  return omega1 * r * r * r;
}

}  // namespace levdyn
