#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "levdyn/model.hpp"
#include "levdyn/orbit.hpp"

namespace levdyn {

enum class SweepAxis { omega, pi1, omega1, omega2 };

std::string_view to_string(SweepAxis axis);
std::optional<SweepAxis> parse_sweep_axis(std::string_view name);

/// Regime of one parameter point. `unresolved` covers runs with no period
/// detected and a top exponent <= kAperiodicThreshold (slow transients).
enum class Regime { infeasible, fixed_point, periodic, aperiodic, unresolved };

std::string_view to_string(Regime r);

inline constexpr double kAperiodicThreshold = 1e-3;

struct Classification {
  Regime regime = Regime::infeasible;
  std::size_t period = 0;  // set for fixed_point (1) and periodic (p >= 2)

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// `name` renders as e.g. "fixed-point", "periodic-4", "aperiodic".
std::string describe(const Classification& c);

/// Precedence: infeasible > fixed-point > periodic-p > aperiodic.
Classification classify(bool any_survivor, const PeriodReport& period, double lyapunov_top);

struct SweepSpec {
  SweepAxis axis = SweepAxis::omega;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t resolution = 200;
  ModelParams fixed = ModelParams::single(0.5);
  std::size_t transient = kDefaultTransient;
  std::size_t record = kDefaultRecord;
  std::size_t initials_per_point = 3;
  std::uint64_t rng_seed = 0;
  std::size_t lyapunov_steps = 2000;
  std::size_t p_max = kDefaultMaxPeriod;
  double period_tol = kDefaultPeriodTolerance;

  void validate() const;

  /// Parameter value at grid index i (bitwise shared between refinements).
  double value_at(std::size_t i) const;

  /// Fixed parameters with the swept coordinate set to `value`.
  ModelParams params_at(double value) const;
};

/// Recorded leverages of one surviving run, samples[bank][k].
struct Branch {
  std::vector<double> initial;
  std::vector<std::vector<double>> samples;
};

struct SweepRecord {
  std::size_t index = 0;
  double param_value = 0.0;
  std::vector<Branch> branches;  // surviving runs only
  double lyapunov_top = 0.0;     // first surviving branch; NaN when none survive
  PeriodReport period;
  double survival_fraction = 0.0;
  Classification classification;
};

/// Simulates `initials_per_point` runs at one parameter point.
SweepRecord evaluate_point(const SweepSpec& spec, std::size_t index);

/// One record per grid point in grid order; deterministic for a given seed.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, std::size_t workers = 1);

// Reference protocols: 1000 discarded / 800 recorded (N = 1 omega sweep and
// omega1 sweep at pi1 = 0.5, omega2 = 0.4) and 1000 / 500 (pi1 sweep at
// omega1 = 0.5, omega2 = 0.3).
SweepSpec preset_omega_sweep(std::uint64_t seed);
SweepSpec preset_pi1_sweep(std::uint64_t seed);
SweepSpec preset_omega1_sweep(std::uint64_t seed);

struct StabilityMapSpec {
  double omega1_lo = 0.3, omega1_hi = 1.0;
  double omega2_lo = 0.3, omega2_hi = 1.0;
  std::size_t omega1_resolution = 20;
  std::size_t omega2_resolution = 20;
  double pi1 = 0.5;
  MarketParams market;
  std::size_t transient = kDefaultTransient;
  std::size_t record = kDefaultRecord;
  std::size_t initials_per_point = 3;
  std::uint64_t rng_seed = 0;
  std::size_t lyapunov_steps = 2000;
  std::size_t p_max = kDefaultMaxPeriod;
  double period_tol = kDefaultPeriodTolerance;
};

struct StabilityCell {
  double omega1 = 0.0;
  double omega2 = 0.0;
  Classification classification;
  double lyapunov_top = 0.0;
  double survival_fraction = 0.0;
};

struct StabilityMap {
  std::vector<double> omega1_values;
  std::vector<double> omega2_values;
  std::vector<StabilityCell> cells;  // row-major: omega1 index major

  const StabilityCell& at(std::size_t i1, std::size_t i2) const {
    return cells[i1 * omega2_values.size() + i2];
  }
};

StabilityMap stability_map(const StabilityMapSpec& spec, std::size_t workers = 1);

}  // namespace levdyn
