#include "levdyn/sweep.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "levdyn/lyapunov.hpp"
#include "levdyn/parallel.hpp"
#include "levdyn/random.hpp"

namespace levdyn {

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::omega: return "omega";
    case SweepAxis::pi1: return "pi1";
    case SweepAxis::omega1: return "omega1";
    case SweepAxis::omega2: return "omega2";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view name) {
  if (name == "omega") return SweepAxis::omega;
  if (name == "pi1") return SweepAxis::pi1;
  if (name == "omega1") return SweepAxis::omega1;
  if (name == "omega2") return SweepAxis::omega2;
  return std::nullopt;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::infeasible: return "infeasible";
    case Regime::fixed_point: return "fixed-point";
    case Regime::periodic: return "periodic";
    case Regime::aperiodic: return "aperiodic";
    case Regime::unresolved: return "unresolved";
  }
  return "unknown";
}

std::string describe(const Classification& c) {
  if (c.regime == Regime::periodic) return "periodic-" + std::to_string(c.period);
  return std::string(to_string(c.regime));
}

Classification classify(bool any_survivor, const PeriodReport& period, double lyapunov_top) {
  if (!any_survivor) return {Regime::infeasible, 0};
  if (period.period) {
    const std::size_t p = *period.period;
    return {p == 1 ? Regime::fixed_point : Regime::periodic, p};
  }
  if (lyapunov_top > kAperiodicThreshold) return {Regime::aperiodic, 0};
  return {Regime::unresolved, 0};
}

void SweepSpec::validate() const {
  if (resolution < 2) {
    throw EmptyGridError("sweep resolution must be >= 2, got " + std::to_string(resolution));
  }
  if (!(lo < hi)) throw ParamError("sweep range requires lo < hi");
  if (lo < 0.0 || hi > 1.0) {
    throw ParamError("sweep range for " + std::string(to_string(axis)) + " must lie in [0, 1]");
  }
  if (initials_per_point == 0) throw ParamError("initials_per_point must be >= 1");
  if (record < 3 * p_max) {
    throw ParamError("record must be >= 3 * p_max for period detection");
  }
  if (lyapunov_steps == 0) throw ParamError("lyapunov_steps must be >= 1");
  const std::size_t needed = (axis == SweepAxis::omega) ? 1 : 2;
  if (fixed.n_banks() != needed) {
    throw ParamError("axis " + std::string(to_string(axis)) + " needs a " +
                     std::to_string(needed) + "-bank model");
  }
  params_at(lo).validate();
  params_at(hi).validate();
}

double SweepSpec::value_at(std::size_t i) const {
  if (i + 1 == resolution) return hi;
  const double q = static_cast<double>(i) / static_cast<double>(resolution - 1);
  return lo + (hi - lo) * q;
}

ModelParams SweepSpec::params_at(double value) const {
  ModelParams p = fixed;
  switch (axis) {
    case SweepAxis::omega: p.omegas.at(0) = value; break;
    case SweepAxis::pi1:
      p.pis.at(0) = value;
      p.pis.at(1) = 1.0 - value;
      break;
    case SweepAxis::omega1: p.omegas.at(0) = value; break;
    case SweepAxis::omega2: p.omegas.at(1) = value; break;
  }
  return p;
}

namespace {

struct PointResult {
  std::vector<Branch> branches;
  double lyapunov_top = std::numeric_limits<double>::quiet_NaN();
  PeriodReport period;
  double survival_fraction = 0.0;
  Classification classification;
};

/// Shared core of sweeps and stability maps: simulate, classify first survivor.
PointResult simulate_point(const ModelParams& params, std::uint64_t seed, std::size_t initials,
                           std::size_t transient, std::size_t record, std::size_t lyap_steps,
                           std::size_t p_max, double tol) {
  PointResult out;
  Rng rng(seed);
  std::optional<LeverageState> first_start;
  for (std::size_t k = 0; k < initials; ++k) {
    auto x = sample_box(params, rng);
    const auto start = LeverageState::make(x, params);
    if (!start.feasible()) continue;
    auto trace = iterate(start, params, transient, record);
    if (!trace.complete()) continue;
    if (!first_start) {
      first_start = start;
      out.period = detect_period(trace, p_max, tol);
    }
    Branch b;
    b.initial = std::move(x);
    b.samples.resize(params.n_banks());
    for (std::size_t i = 0; i < params.n_banks(); ++i) b.samples[i] = trace.series(i);
    out.branches.push_back(std::move(b));
  }
  out.survival_fraction =
      static_cast<double>(out.branches.size()) / static_cast<double>(initials);
  if (first_start) {
    try {
      out.lyapunov_top = lyapunov_spectrum(*first_start, params, transient, lyap_steps).top();
    } catch (const OrbitViolationError&) {
      // record window survived but the longer exponent run did not
      out.lyapunov_top = std::numeric_limits<double>::quiet_NaN();
    }
  }
  out.classification = classify(first_start.has_value(), out.period, out.lyapunov_top);
  return out;
}

std::uint64_t point_seed(std::uint64_t base, double value) {
  return derive_seed(base, std::bit_cast<std::uint64_t>(value));
}

}  // namespace

SweepRecord evaluate_point(const SweepSpec& spec, std::size_t index) {
  const double v = spec.value_at(index);
  auto r = simulate_point(spec.params_at(v), point_seed(spec.rng_seed, v), spec.initials_per_point,
                          spec.transient, spec.record, spec.lyapunov_steps, spec.p_max,
                          spec.period_tol);
  SweepRecord rec;
  rec.index = index;
  rec.param_value = v;
  rec.branches = std::move(r.branches);
  rec.lyapunov_top = r.lyapunov_top;
  rec.period = r.period;
  rec.survival_fraction = r.survival_fraction;
  rec.classification = r.classification;
  return rec;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, std::size_t workers) {
  spec.validate();
  return parallel_map(spec.resolution, workers,
                      [&](std::size_t i) { return evaluate_point(spec, i); });
}

SweepSpec preset_omega_sweep(std::uint64_t seed) {
  SweepSpec s;
  s.axis = SweepAxis::omega;
  s.lo = 0.0;
  s.hi = 1.0;
  s.resolution = 800;
  s.fixed = ModelParams::single(0.5);
  s.transient = 1000;
  s.record = 800;
  s.rng_seed = seed;
  return s;
}

SweepSpec preset_pi1_sweep(std::uint64_t seed) {
  SweepSpec s;
  s.axis = SweepAxis::pi1;
  s.lo = 0.0;
  s.hi = 1.0;
  s.resolution = 500;
  s.fixed = ModelParams::pair(0.5, 0.3, 0.5);
  s.transient = 1000;
  s.record = 500;
  s.rng_seed = seed;
  return s;
}

SweepSpec preset_omega1_sweep(std::uint64_t seed) {
  SweepSpec s;
  s.axis = SweepAxis::omega1;
  s.lo = 0.0;
  s.hi = 1.0;
  s.resolution = 800;
  s.fixed = ModelParams::pair(0.5, 0.4, 0.5);
  s.transient = 1000;
  s.record = 800;
  s.rng_seed = seed;
  return s;
}

namespace {

double grid_value(double lo, double hi, std::size_t i, std::size_t n) {
  if (n == 1) return lo;
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n - 1));
}

}  // namespace

StabilityMap stability_map(const StabilityMapSpec& spec, std::size_t workers) {
  if (spec.omega1_resolution < 2 || spec.omega2_resolution < 2) {
    throw EmptyGridError("stability_map: grid must be at least 2 x 2");
  }
  StabilityMap map;
  for (std::size_t i = 0; i < spec.omega1_resolution; ++i) {
    map.omega1_values.push_back(
        grid_value(spec.omega1_lo, spec.omega1_hi, i, spec.omega1_resolution));
  }
  for (std::size_t j = 0; j < spec.omega2_resolution; ++j) {
    map.omega2_values.push_back(
        grid_value(spec.omega2_lo, spec.omega2_hi, j, spec.omega2_resolution));
  }
  ModelParams::pair(spec.omega1_lo, spec.omega2_lo, spec.pi1, spec.market).validate();
  ModelParams::pair(spec.omega1_hi, spec.omega2_hi, spec.pi1, spec.market).validate();

  const std::size_t n2 = map.omega2_values.size();
  map.cells = parallel_map(map.omega1_values.size() * n2, workers, [&](std::size_t k) {
    const double w1 = map.omega1_values[k / n2];
    const double w2 = map.omega2_values[k % n2];
    const auto params = ModelParams::pair(w1, w2, spec.pi1, spec.market);
    const std::uint64_t seed =
        derive_seed(point_seed(spec.rng_seed, w1), std::bit_cast<std::uint64_t>(w2));
    auto r = simulate_point(params, seed, spec.initials_per_point, spec.transient, spec.record,
                            spec.lyapunov_steps, spec.p_max, spec.period_tol);
    return StabilityCell{w1, w2, r.classification, r.lyapunov_top, r.survival_fraction};
  });
  return map;
}

}  // namespace levdyn
