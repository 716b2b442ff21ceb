#include "levdyn/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace levdyn {

namespace {

double floored_log(double v, bool& saturated) {
  const double a = std::abs(v);
  const double l = (a > 0.0) ? std::log(a) : -std::numeric_limits<double>::infinity();
  if (!(l >= kLogFloor)) {
    saturated = true;
    return kLogFloor;
  }
  return l;
}

OrbitViolationError violation_error(std::size_t step, Constraint c, const char* where) {
  return OrbitViolationError(step, c,
                             std::string(where) + ": orbit violated " +
                                 std::string(to_string(c)) + " at step " + std::to_string(step));
}

}  // namespace

LyapunovEstimate lyapunov_1d(double omega, const MarketParams& market, double x0,
                             std::size_t transient, std::size_t steps) {
  if (steps == 0) throw ParamError("lyapunov_1d: steps must be >= 1");
  const std::vector<double> pis{1.0};
  auto status = [&](double x) {
    const double v[1] = {x};
    return check_constraints(v, x, market);
  };
  if (auto c = status(x0); c != Constraint::none) {
    throw InfeasibleStateError(c, "lyapunov_1d: infeasible x0");
  }

  LyapunovEstimate est;
  est.transient = transient;
  double x = x0;
  for (std::size_t t = 0; t < transient; ++t) {
    x = eval_T(x, omega, market);
    if (auto c = status(x); c != Constraint::none) throw violation_error(t + 1, c, "lyapunov_1d");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    sum += floored_log(eval_T_prime(x, omega, market), est.saturated);
    x = eval_T(x, omega, market);
    if (auto c = status(x); c != Constraint::none) {
      throw violation_error(transient + t + 1, c, "lyapunov_1d");
    }
  }
  est.steps_used = steps;
  est.exponents = {sum / static_cast<double>(steps)};
  return est;
}

LyapunovEstimate lyapunov_spectrum(const LeverageState& initial, const ModelParams& params,
                                   std::size_t transient, std::size_t steps,
                                   std::size_t reorth_every) {
  if (reorth_every == 0 || steps < reorth_every) {
    throw ParamError("lyapunov_spectrum: need steps >= reorth_every >= 1");
  }
  if (!initial.feasible()) {
    throw InfeasibleStateError(initial.violated, "lyapunov_spectrum: infeasible initial state");
  }
  const auto n = static_cast<Eigen::Index>(params.n_banks());
  LyapunovEstimate est;
  est.transient = transient;

  LeverageState state = initial;
  for (std::size_t t = 0; t < transient; ++t) {
    state = eval_coupled(state, params);
    if (!state.feasible()) throw violation_error(t + 1, state.violated, "lyapunov_spectrum");
  }

  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(n);
  std::size_t since_qr = 0;
  auto reorthonormalise = [&] {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    Eigen::MatrixXd q = qr.householderQ();
    for (Eigen::Index k = 0; k < n; ++k) {
      sums(k) += floored_log(r(k, k), est.saturated);
      if (r(k, k) < 0.0) q.col(k) = -q.col(k);
    }
    basis = q;
    since_qr = 0;
  };

  for (std::size_t t = 0; t < steps; ++t) {
    basis = eval_jacobian(state, params) * basis;
    state = eval_coupled(state, params);
    if (!state.feasible()) {
      throw violation_error(transient + t + 1, state.violated, "lyapunov_spectrum");
    }
    if (++since_qr == reorth_every) reorthonormalise();
  }
  if (since_qr > 0) reorthonormalise();

  est.steps_used = steps;
  est.exponents.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    est.exponents[static_cast<std::size_t>(k)] = sums(k) / static_cast<double>(steps);
  }
  std::sort(est.exponents.begin(), est.exponents.end(), std::greater<>());
  return est;
}

FiberExponent fiber_exponent(std::span<const double> forcing_orbit, double omega1,
                             const MarketParams& market, double x0, std::size_t steps) {
  if (steps == 0) throw ParamError("fiber_exponent: steps must be >= 1");
  if (forcing_orbit.size() < steps) {
    throw ParamError("fiber_exponent: forcing orbit shorter than requested steps");
  }
  FiberExponent out;
  out.steps = steps;
  out.x_initial = x0;
  if (omega1 == 0.0) {
    out.minus_infinity = true;
    out.value = -std::numeric_limits<double>::infinity();
    out.log_product = out.value;
    out.x_final = eval_fiber_map(x0, forcing_orbit[steps - 1], omega1, market);
    return out;
  }
  double x = x0;
  double sum = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    const double fx = eval_fiber_map(x, forcing_orbit[t], omega1, market);
    const double r = fx / x;
    sum += std::log(omega1 * r * r * r);
    x = fx;
  }
  out.log_product = sum;
  out.value = sum / static_cast<double>(steps);
  out.x_final = x;
  return out;
}

}  // namespace levdyn
