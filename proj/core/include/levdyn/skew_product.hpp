#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "levdyn/model.hpp"
#include "levdyn/orbit.hpp"
#include "levdyn/sweep.hpp"

namespace levdyn {

enum class HistorySource { forward_orbit, explicit_values };

/// A window of the forcing bank's orbit with a "present" index: entries
/// before `now` form the past (lambda_{2,-1}, lambda_{2,-2}, ...), entries
/// from `now` on are its forward continuation.
struct ForcingHistory {
  std::vector<double> orbit;  // chronological
  std::size_t now = 0;
  double omega2 = 0.0;        // forcing memory (forward_orbit source)
  MarketParams market;
  HistorySource source = HistorySource::explicit_values;
  double upper_bound = 0.0;   // supremum of admissible forcing values, past included

  std::size_t depth() const { return now; }
  double present() const { return orbit.at(now); }
  /// past(k) = lambda_{2, -(k+1)}
  double past(std::size_t k) const { return orbit.at(now - 1 - k); }
  bool can_shift() const { return now + 1 < orbit.size(); }
  /// Shift map on the natural extension: the present becomes the newest past entry.
  ForcingHistory shifted() const;

  /// Largest |T(orbit[t]) - orbit[t+1]| (zero for forward-orbit histories).
  double max_orbit_defect() const;
};

/// Tail of a long forward orbit of T: `transient` steps are discarded, then
/// `depth` past values, the present, and `future` further values are kept.
ForcingHistory make_forcing_history(double omega2, const MarketParams& market, double x0,
                                    std::size_t transient, std::size_t depth,
                                    std::size_t future = 0);

/// History built from given values (e.g. a constant sequence). The unseen
/// past is assumed to stay below max(values).
ForcingHistory explicit_history(std::vector<double> chronological, std::size_t now,
                                const MarketParams& market);

/// Fiber iterates x_0 = x0, x_{t+1} = f_{forcing[t]}(x_t); size forcing.size() + 1.
std::vector<double> forced_orbit(std::span<const double> forcing, double omega1,
                                 const MarketParams& market, double x0);

struct RandomFixedPoint {
  double value = 0.0;
  std::size_t truncation_depth = 0;
  double tail_bound = 0.0;  // certified |value - exact series value|
};

/// Pullback limit x(lambda) = (sum_i (1 - omega1) omega1^i A(lambda_{2,-1-i}))^(-1/2)
/// truncated at the history depth. Throws TailBoundError if the certified
/// truncation error exceeds `tol`.
RandomFixedPoint random_fixed_point(const ForcingHistory& history, double omega1, double tol);

/// Depth needed so that the tail bound is at most `tol` (upper-bound estimate).
std::size_t required_depth(const ForcingHistory& history, double omega1, double tol);

struct PairContraction {
  double mean_log_rate = 0.0;  // (log d_n - log d_0) / n
  double log_distance_initial = 0.0;
  double log_distance_final = 0.0;
  std::size_t steps = 0;
};

/// Tracks the distance between two fiber orbits under the same forcing in
/// the cancellation-free secant form, so it stays exact below rounding level.
PairContraction fiber_pair_contraction(std::span<const double> forcing, double omega1,
                                       const MarketParams& market, double x0, double x0_prime);

struct ForcingResponse {
  PeriodReport forcing_period;
  double forcing_lyapunov = 0.0;
  Classification forcing_class;
  PeriodReport forced_period;
  Classification forced_class;
  /// periodic forcing => forced period equal; aperiodic forcing => aperiodic forced.
  bool implication_holds = false;
};

struct ForcingResponseOptions {
  std::size_t transient = 1000;
  std::size_t steps = 2000;
  std::size_t p_max = kDefaultMaxPeriod;
  double tol = kDefaultPeriodTolerance;
  double forcing_x0 = 50.0;
  double forced_x0 = 50.0;
};

/// Classifies the forcing orbit (T with omega_forcing) and the forced fiber
/// orbit (memory omega_forced) it drives.
ForcingResponse forcing_response_classification(double omega_forced, double omega_forcing,
                                                const MarketParams& market,
                                                const ForcingResponseOptions& options = {});

struct CoverageReport {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t bins = 0;
  std::size_t occupied = 0;
  std::size_t gaps = 0;  // maximal runs of empty bins inside [lo, hi]
  double occupied_fraction() const { return bins ? double(occupied) / double(bins) : 0.0; }
};

/// Occupancy of [min, max] of the visited set split into `bins` cells.
CoverageReport visited_coverage(std::span<const double> orbit, std::size_t bins = 50);

}  // namespace levdyn
