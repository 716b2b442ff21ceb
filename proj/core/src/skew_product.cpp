#include "levdyn/skew_product.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "levdyn/lyapunov.hpp"

namespace levdyn {

ForcingHistory ForcingHistory::shifted() const {
  if (!can_shift()) throw ParamError("ForcingHistory::shifted: no forward continuation left");
  ForcingHistory h = *this;
  ++h.now;
  return h;
}

double ForcingHistory::max_orbit_defect() const {
  double worst = 0.0;
  for (std::size_t t = 0; t + 1 < orbit.size(); ++t) {
    worst = std::max(worst, std::abs(eval_T(orbit[t], omega2, market) - orbit[t + 1]));
  }
  return worst;
}

ForcingHistory make_forcing_history(double omega2, const MarketParams& market, double x0,
                                    std::size_t transient, std::size_t depth,
                                    std::size_t future) {
  ForcingHistory h;
  h.omega2 = omega2;
  h.market = market;
  h.source = HistorySource::forward_orbit;
  h.now = depth;
  h.orbit.reserve(depth + 1 + future);

  const std::size_t total = transient + depth + 1 + future;
  double x = x0;
  for (std::size_t t = 0; t < total; ++t) {
    if (t > 0) x = eval_T(x, omega2, market);
    const double v[1] = {x};
    if (auto c = check_constraints(v, x, market); c != Constraint::none) {
      throw OrbitViolationError(t, c, "make_forcing_history: forcing orbit violated " +
                                          std::string(to_string(c)) + " at step " +
                                          std::to_string(t));
    }
    if (t >= transient) h.orbit.push_back(x);
  }
  h.upper_bound = std::max(max_image(omega2, market),
                           *std::max_element(h.orbit.begin(), h.orbit.end()));
  return h;
}

ForcingHistory explicit_history(std::vector<double> chronological, std::size_t now,
                                const MarketParams& market) {
  if (now >= chronological.size()) throw ParamError("explicit_history: `now` out of range");
  ForcingHistory h;
  h.market = market;
  h.source = HistorySource::explicit_values;
  h.now = now;
  h.upper_bound = *std::max_element(chronological.begin(), chronological.end());
  h.orbit = std::move(chronological);
  return h;
}

std::vector<double> forced_orbit(std::span<const double> forcing, double omega1,
                                 const MarketParams& market, double x0) {
  std::vector<double> xs;
  xs.reserve(forcing.size() + 1);
  xs.push_back(x0);
  for (double y : forcing) xs.push_back(eval_fiber_map(xs.back(), y, omega1, market));
  return xs;
}

namespace {

double kernel_bound(const ForcingHistory& h) {
  if (!(h.upper_bound < h.market.cap())) return std::numeric_limits<double>::infinity();
  return endogenous_kernel(h.upper_bound, h.market);
}

void check_fiber_memory(double omega1) {
  if (!(omega1 >= 0.0 && omega1 < 1.0)) {
    throw ParamError("random fixed point requires 0 <= omega1 < 1");
  }
}

}  // namespace

RandomFixedPoint random_fixed_point(const ForcingHistory& history, double omega1, double tol) {
  check_fiber_memory(omega1);
  const std::size_t depth = history.depth();
  if (depth == 0) throw TailBoundError("random_fixed_point: history has no past entries");

  double sum = 0.0;
  for (std::size_t k = depth; k-- > 0;) {
    sum = omega1 * sum + (1.0 - omega1) * endogenous_kernel(history.past(k), history.market);
  }
  RandomFixedPoint out;
  out.value = 1.0 / std::sqrt(sum);
  out.truncation_depth = depth;
  // omitted terms sum to at most omega1^M * A_max; d(S^-1/2)/dS = -S^-3/2 / 2
  const double remainder = std::pow(omega1, static_cast<double>(depth)) * kernel_bound(history);
  out.tail_bound = 0.5 * out.value * out.value * out.value * remainder;
  if (!(out.tail_bound <= tol)) {
    throw TailBoundError("random_fixed_point: tail bound " + std::to_string(out.tail_bound) +
                         " exceeds tolerance at depth " + std::to_string(depth) +
                         " (need about " + std::to_string(required_depth(history, omega1, tol)) +
                         ")");
  }
  return out;
}

std::size_t required_depth(const ForcingHistory& history, double omega1, double tol) {
  check_fiber_memory(omega1);
  if (omega1 == 0.0) return 1;
  const double a_max = kernel_bound(history);
  if (!std::isfinite(a_max)) return std::numeric_limits<std::size_t>::max();
  // every partial sum is at least (1 - omega1) A_min with A_min >= A(1)
  const double a_min = endogenous_kernel(1.0, history.market);
  const double x_max = 1.0 / std::sqrt((1.0 - omega1) * a_min);
  const double need = std::log(2.0 * tol / (x_max * x_max * x_max * a_max)) / std::log(omega1);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(need)));
}

PairContraction fiber_pair_contraction(std::span<const double> forcing, double omega1,
                                       const MarketParams& market, double x0, double x0_prime) {
  if (x0 == x0_prime) throw ParamError("fiber_pair_contraction: initial points must differ");
  if (!(omega1 > 0.0 && omega1 < 1.0)) {
    throw ParamError("fiber_pair_contraction: requires 0 < omega1 < 1");
  }
  PairContraction out;
  out.steps = forcing.size();
  double x = std::min(x0, x0_prime);
  double y = std::max(x0, x0_prime);
  double log_d = std::log(y - x);
  out.log_distance_initial = log_d;
  for (double z : forcing) {
    const double fx = eval_fiber_map(x, z, omega1, market);
    const double fy = eval_fiber_map(y, z, omega1, market);
    // f(y) - f(x) = omega1 (y - x)(x + y) fx^2 fy^2 / (x^2 y^2 (fx + fy))
    const double factor = omega1 * (x + y) * (fx * fx) * (fy * fy) / ((x * x) * (y * y) * (fx + fy));
    log_d += std::log(factor);
    x = fx;
    y = fx + std::exp(log_d);
  }
  out.log_distance_final = log_d;
  if (out.steps > 0) out.mean_log_rate = (log_d - out.log_distance_initial) / double(out.steps);
  return out;
}

ForcingResponse forcing_response_classification(double omega_forced, double omega_forcing,
                                                const MarketParams& market,
                                                const ForcingResponseOptions& opt) {
  const auto history =
      make_forcing_history(omega_forcing, market, opt.forcing_x0, 0, 0, opt.transient + opt.steps);
  const std::span<const double> forcing(history.orbit);
  const auto forced = forced_orbit(forcing, omega_forced, market, opt.forced_x0);

  ForcingResponse r;
  r.forcing_period = detect_period(forcing.subspan(opt.transient), 1, opt.p_max, opt.tol);
  r.forcing_lyapunov =
      lyapunov_1d(omega_forcing, market, opt.forcing_x0, opt.transient, opt.steps).top();
  r.forcing_class = classify(true, r.forcing_period, r.forcing_lyapunov);

  // forced[t] is the fiber value at time t; drop x0 and the transient
  r.forced_period = detect_period(std::span<const double>(forced).subspan(opt.transient + 1), 1,
                                  opt.p_max, opt.tol);
  if (r.forced_period.period) {
    const std::size_t p = *r.forced_period.period;
    r.forced_class = {p == 1 ? Regime::fixed_point : Regime::periodic, p};
  } else {
    r.forced_class = {Regime::aperiodic, 0};
  }

  switch (r.forcing_class.regime) {
    case Regime::fixed_point:
    case Regime::periodic:
      r.implication_holds = r.forced_period.period == r.forcing_period.period;
      break;
    case Regime::aperiodic: r.implication_holds = !r.forced_period.period.has_value(); break;
    default: r.implication_holds = true; break;
  }
  return r;
}

CoverageReport visited_coverage(std::span<const double> orbit, std::size_t bins) {
  if (orbit.empty() || bins == 0) throw ParamError("visited_coverage: empty input");
  CoverageReport rep;
  rep.bins = bins;
  rep.lo = *std::min_element(orbit.begin(), orbit.end());
  rep.hi = *std::max_element(orbit.begin(), orbit.end());
  std::vector<bool> hit(bins, false);
  const double width = rep.hi - rep.lo;
  for (double v : orbit) {
    std::size_t k = width > 0.0 ? static_cast<std::size_t>((v - rep.lo) / width * double(bins)) : 0;
    hit[std::min(k, bins - 1)] = true;
  }
  rep.occupied = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true));
  for (std::size_t k = 1; k < bins; ++k) {
    if (!hit[k] && hit[k - 1]) ++rep.gaps;
  }
  return rep;
}

}  // namespace levdyn
