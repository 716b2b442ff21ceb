#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "levdyn/model.hpp"

namespace levdyn {

/// log|slope| values below this are clamped and the estimate marked saturated.
inline constexpr double kLogFloor = -700.0;

struct LyapunovEstimate {
  std::vector<double> exponents;  // descending
  std::size_t steps_used = 0;
  std::size_t transient = 0;
  bool saturated = false;

  double top() const { return exponents.front(); }
};

/// Transient/step budget. `short_run()` is the short 100-step protocol used for
/// quick scans; `production()` is the default for classification.
struct LyapunovProtocol {
  std::size_t transient = 1000;
  std::size_t steps = 100000;

  static constexpr LyapunovProtocol production() { return {1000, 100000}; }
  static constexpr LyapunovProtocol short_run() { return {1000, 100}; }
};

/// (1/steps) sum log|T'(lambda_t)| along the orbit of T after `transient`.
/// Throws OrbitViolationError if the orbit leaves [1, 1 + gamma].
LyapunovEstimate lyapunov_1d(double omega, const MarketParams& market, double x0,
                             std::size_t transient, std::size_t steps);

/// Full spectrum by QR re-orthonormalisation of Jacobian products every
/// `reorth_every` steps.
LyapunovEstimate lyapunov_spectrum(const LeverageState& initial, const ModelParams& params,
                                   std::size_t transient, std::size_t steps,
                                   std::size_t reorth_every = 1);

struct FiberExponent {
  double value = 0.0;        // (1/steps) log|(f^n)'(x0)|; -inf when omega1 == 0
  double log_product = 0.0;  // sum of log f'
  std::size_t steps = 0;
  double x_initial = 0.0;
  double x_final = 0.0;
  bool minus_infinity = false;
};

/// Fiber exponent of the forced bank along a given forcing orbit.
FiberExponent fiber_exponent(std::span<const double> forcing_orbit, double omega1,
                             const MarketParams& market, double x0, std::size_t steps);

}  // namespace levdyn
