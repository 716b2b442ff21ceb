#include "levdyn/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>

#include "levdyn/logging.hpp"
#include "levdyn/parallel.hpp"

namespace levdyn {

AttractorCloud capture_cloud(const LeverageState& initial, const ModelParams& params,
                             std::size_t transient, std::size_t n_points) {
  if (params.n_banks() < 2) throw ParamError("capture_cloud: needs at least two banks");
  if (n_points == 0) throw ParamError("capture_cloud: n_points must be >= 1");
  if (!initial.feasible()) {
    throw InfeasibleStateError(initial.violated, "capture_cloud: infeasible initial state");
  }
  AttractorCloud cloud;
  cloud.params = params;
  cloud.transient = transient;
  cloud.points.reserve(n_points);

  LeverageState state = initial;
  for (std::size_t step = 1; step <= transient + n_points; ++step) {
    state = eval_coupled(state, params);
    if (!state.feasible()) {
      throw OrbitViolationError(step, state.violated,
                                "capture_cloud: orbit violated " +
                                    std::string(to_string(state.violated)) + " at step " +
                                    std::to_string(step));
    }
    if (step > transient) cloud.points.push_back({state.lambdas[0], state.lambdas[1]});
  }
  return cloud;
}

// Grid offsets in units of eps, distinct per axis so that the diagonals of the
// unit square never run through grid corners.
constexpr double kOffsetX = 0.3819660112501051;
constexpr double kOffsetY = 0.2360679774997897;

std::size_t count_boxes(std::span<const Point2> unit_points, double eps) {
  const auto cells_per_axis = static_cast<std::uint64_t>(std::floor(1.0 / eps)) + 2;
  std::unordered_set<std::uint64_t> occupied;
  occupied.reserve(std::min<std::size_t>(unit_points.size(), 1u << 22));
  for (const auto& p : unit_points) {
    const auto ix = static_cast<std::uint64_t>(std::floor(p[0] / eps + kOffsetX));
    const auto iy = static_cast<std::uint64_t>(std::floor(p[1] / eps + kOffsetY));
    occupied.insert(ix * cells_per_axis + iy);
  }
  return occupied.size();
}

namespace {

struct LineFit {
  double slope;
  double stderr_slope;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    sse += r * r;
  }
  const double se = (x.size() > 2) ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return {slope, se};
}

/// Longest run of local slopes whose spread stays below `spread`; ties go to
/// the run with the smaller spread.
std::pair<std::size_t, std::size_t> auto_fit_range(std::span<const double> local, double spread) {
  std::size_t best_lo = 0, best_len = 0;
  double best_spread = 0.0;
  for (std::size_t lo = 0; lo < local.size(); ++lo) {
    double mn = local[lo], mx = local[lo];
    for (std::size_t hi = lo; hi < local.size(); ++hi) {
      mn = std::min(mn, local[hi]);
      mx = std::max(mx, local[hi]);
      if (mx - mn >= spread) break;
      const std::size_t len = hi - lo + 1;
      if (len > best_len || (len == best_len && mx - mn < best_spread)) {
        best_lo = lo;
        best_len = len;
        best_spread = mx - mn;
      }
    }
  }
  // local slope k joins scales k and k + 1
  return {best_lo, best_lo + best_len};
}

}  // namespace

DimensionFit box_dimension(std::span<const Point2> points, const BoxCountOptions& options) {
  if (options.n_scales < 3) throw ParamError("box_dimension: need at least 3 scales");
  if (!(options.eps_ratio > 0.0 && options.eps_ratio < 1.0)) {
    throw ParamError("box_dimension: eps_ratio must lie in (0, 1)");
  }
  if (points.empty()) throw DegenerateCloudError("box_dimension: empty cloud");
  if (points.size() < 100000) {
    log::warn("box_dimension: only " + std::to_string(points.size()) +
              " points; fits below 1e5 points are unreliable");
  }

  Point2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  const double ex = hi[0] - lo[0];
  const double ey = hi[1] - lo[1];
  if (!(ex > 0.0 && ey > 0.0)) {
    throw DegenerateCloudError("box_dimension: cloud has zero extent along an axis");
  }
  std::vector<Point2> unit(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    unit[i] = {(points[i][0] - lo[0]) / ex, (points[i][1] - lo[1]) / ey};
  }

  DimensionFit fit;
  for (std::size_t k = 0; k < options.n_scales; ++k) {
    fit.epsilons.push_back(options.eps_max * std::pow(options.eps_ratio, static_cast<double>(k)));
  }
  fit.counts = parallel_map(options.n_scales, options.workers, [&](std::size_t k) {
    return count_boxes(unit, fit.epsilons[k]);
  });

  std::vector<double> log_inv_eps, log_n;
  for (std::size_t k = 0; k < options.n_scales; ++k) {
    log_inv_eps.push_back(-std::log(fit.epsilons[k]));
    log_n.push_back(std::log(static_cast<double>(fit.counts[k])));
  }
  for (std::size_t k = 0; k + 1 < options.n_scales; ++k) {
    fit.local_slopes.push_back((log_n[k + 1] - log_n[k]) / (log_inv_eps[k + 1] - log_inv_eps[k]));
  }

  if (options.fit_range) {
    const auto [a, b] = *options.fit_range;
    if (!(a < b && b < options.n_scales)) throw ParamError("box_dimension: invalid fit_range");
    fit.fit_range = {a, b};
  } else {
    fit.fit_range = auto_fit_range(fit.local_slopes, options.max_slope_spread);
  }
  const auto [a, b] = fit.fit_range;
  const auto line = least_squares(std::span(log_inv_eps).subspan(a, b - a + 1),
                                  std::span(log_n).subspan(a, b - a + 1));
  fit.slope = line.slope;
  fit.stderr_slope = line.stderr_slope;
  return fit;
}

}  // namespace levdyn
