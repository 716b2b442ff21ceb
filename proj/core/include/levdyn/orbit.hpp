#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "levdyn/model.hpp"

namespace levdyn {

struct Violation {
  std::size_t step = 0;  // number of map applications that produced the state
  Constraint constraint = Constraint::none;
  LeverageState state;
};

/// Trajectory of the coupled map. Step 0 is the initial state; `recorded`
/// holds steps transient, transient + 1, ... until `requested` states or a
/// violation, whichever comes first.
struct OrbitTrace {
  ModelParams params;
  LeverageState initial;
  std::size_t transient_len = 0;
  std::size_t requested = 0;
  std::vector<LeverageState> recorded;
  std::optional<Violation> violation;

  bool complete() const { return !violation && recorded.size() == requested; }

  std::vector<double> series(std::size_t bank) const;

  /// Recorded leverages flattened row-major, one row of N values per step.
  std::vector<double> flattened() const;
};

inline constexpr std::size_t kDefaultTransient = 1000;
inline constexpr std::size_t kDefaultRecord = 800;

/// Runs the coupled map. Constraint violations are reported in the trace and
/// stop the run; they are not thrown.
OrbitTrace iterate(const LeverageState& initial, const ModelParams& params,
                   std::size_t transient = kDefaultTransient,
                   std::size_t record = kDefaultRecord);

/// |lambda_i - lambda_j| / (lambda_i + lambda_j).
double sync_metric(const LeverageState& state, std::size_t i, std::size_t j);

/// Largest pairwise sync_metric over all banks.
double max_sync_metric(const LeverageState& state);

struct PeriodReport {
  std::optional<std::size_t> period;  // empty means aperiodic at this p_max
  double tolerance = 0.0;
  std::size_t window = 0;

  bool periodic() const { return period.has_value(); }
};

inline constexpr std::size_t kDefaultMaxPeriod = 64;
inline constexpr double kDefaultPeriodTolerance = 1e-7;

/// Minimal p <= p_max with |x_{t+p} - x_t| < tol componentwise over the last
/// 3 p_max recorded states.
PeriodReport detect_period(const OrbitTrace& trace, std::size_t p_max = kDefaultMaxPeriod,
                           double tol = kDefaultPeriodTolerance);

/// Same test on a row-major series with `dim` components per step.
PeriodReport detect_period(std::span<const double> series, std::size_t dim,
                           std::size_t p_max = kDefaultMaxPeriod,
                           double tol = kDefaultPeriodTolerance);

struct FeasibleSetEstimate {
  std::size_t n_samples = 0;
  double survival_fraction = 0.0;
  std::vector<std::vector<double>> survivors;  // initial conditions that never violated
};

/// Monte-Carlo under-approximation of the set of initial conditions in
/// [1, 1 + gamma]^N whose orbits stay feasible for `horizon` steps.
FeasibleSetEstimate estimate_feasible_set(const ModelParams& params, std::size_t n_samples,
                                          std::size_t horizon, std::uint64_t rng_seed);

}  // namespace levdyn
