#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "levdyn/model.hpp"

namespace levdyn {

using Point2 = std::array<double, 2>;

/// Long-run orbit projected onto the (lambda_1, lambda_2) plane.
struct AttractorCloud {
  std::vector<Point2> points;
  ModelParams params;
  std::size_t transient = 0;

  std::size_t count() const { return points.size(); }
};

/// Runs `transient` discarded steps, then stores `n_points` states.
/// Throws OrbitViolationError if the orbit leaves the feasible set.
AttractorCloud capture_cloud(const LeverageState& initial, const ModelParams& params,
                             std::size_t transient, std::size_t n_points);

struct BoxCountOptions {
  double eps_max = 0.125;             // largest box side, unit-square coordinates
  double eps_ratio = 0.70710678118654752;  // successive sizes shrink by 2^(-1/2)
  std::size_t n_scales = 12;
  std::optional<std::pair<std::size_t, std::size_t>> fit_range;  // inclusive scale indices
  double max_slope_spread = 0.1;      // automatic window: local slopes within this band
  std::size_t workers = 1;
};

struct DimensionFit {
  std::vector<double> epsilons;   // decreasing
  std::vector<std::size_t> counts;
  std::vector<double> local_slopes;  // between consecutive scales
  double slope = 0.0;
  double stderr_slope = 0.0;
  std::pair<std::size_t, std::size_t> fit_range{0, 0};  // inclusive
};

/// Normalises the cloud to its bounding box, counts occupied boxes per scale
/// and fits log N(eps) against log(1/eps) over the fit range.
DimensionFit box_dimension(std::span<const Point2> points, const BoxCountOptions& options = {});

inline DimensionFit box_dimension(const AttractorCloud& cloud,
                                  const BoxCountOptions& options = {}) {
  return box_dimension(std::span<const Point2>(cloud.points), options);
}

/// Occupied cells at box side eps for points already in [0, 1]^2. The grid is
/// shifted by a fixed fraction of eps, different on each axis.
std::size_t count_boxes(std::span<const Point2> unit_points, double eps);

}  // namespace levdyn
