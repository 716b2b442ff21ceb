#include "levdyn/orbit.hpp"

#include <cmath>
#include <string>

#include "levdyn/random.hpp"

namespace levdyn {

std::vector<double> OrbitTrace::series(std::size_t bank) const {
  std::vector<double> out;
  out.reserve(recorded.size());
  for (const auto& s : recorded) out.push_back(s.lambdas.at(bank));
  return out;
}

std::vector<double> OrbitTrace::flattened() const {
  std::vector<double> out;
  out.reserve(recorded.size() * params.n_banks());
  for (const auto& s : recorded) out.insert(out.end(), s.lambdas.begin(), s.lambdas.end());
  return out;
}

OrbitTrace iterate(const LeverageState& initial, const ModelParams& params, std::size_t transient,
                   std::size_t record) {
  if (!initial.feasible()) {
    throw InfeasibleStateError(initial.violated, "iterate: initial state is infeasible (" +
                                                     std::string(to_string(initial.violated)) +
                                                     ")");
  }
  OrbitTrace trace;
  trace.params = params;
  trace.initial = initial;
  trace.transient_len = transient;
  trace.requested = record;
  trace.recorded.reserve(record);

  LeverageState state = initial;
  const std::size_t last = transient + record;
  for (std::size_t step = 0; step < last; ++step) {
    if (step > 0) {
      state = eval_coupled(state, params);
      if (!state.feasible()) {
        trace.violation = Violation{step, state.violated, state};
        break;
      }
    }
    if (step >= transient) trace.recorded.push_back(state);
  }
  return trace;
}

double sync_metric(const LeverageState& state, std::size_t i, std::size_t j) {
  if (i >= state.size() || j >= state.size()) {
    throw ParamError("sync_metric: bank index out of range");
  }
  const double a = state.lambdas[i];
  const double b = state.lambdas[j];
  if (!(a > 0.0 && b > 0.0)) throw DomainError("sync_metric: leverages must be positive");
  return std::abs(a - b) / (a + b);
}

double max_sync_metric(const LeverageState& state) {
  double worst = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (std::size_t j = i + 1; j < state.size(); ++j) {
      worst = std::max(worst, sync_metric(state, i, j));
    }
  }
  return worst;
}

PeriodReport detect_period(std::span<const double> series, std::size_t dim, std::size_t p_max,
                           double tol) {
  if (dim == 0 || p_max == 0) throw ParamError("detect_period: dim and p_max must be positive");
  const std::size_t steps = series.size() / dim;
  const std::size_t window = 3 * p_max;
  if (steps < window) {
    throw InsufficientTraceError("detect_period: need " + std::to_string(window) +
                                 " recorded steps, have " + std::to_string(steps));
  }
  PeriodReport report;
  report.tolerance = tol;
  report.window = window;

  const std::size_t start = steps - window;
  for (std::size_t p = 1; p <= p_max; ++p) {
    bool ok = true;
    for (std::size_t t = start; ok && t + p < steps; ++t) {
      for (std::size_t k = 0; k < dim; ++k) {
        if (!(std::abs(series[(t + p) * dim + k] - series[t * dim + k]) < tol)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      report.period = p;
      break;
    }
  }
  return report;
}

PeriodReport detect_period(const OrbitTrace& trace, std::size_t p_max, double tol) {
  if (trace.violation) {
    throw InsufficientTraceError("detect_period: trace ended in a constraint violation");
  }
  const auto flat = trace.flattened();
  return detect_period(flat, trace.params.n_banks(), p_max, tol);
}

FeasibleSetEstimate estimate_feasible_set(const ModelParams& params, std::size_t n_samples,
                                          std::size_t horizon, std::uint64_t rng_seed) {
  if (n_samples == 0) throw ParamError("estimate_feasible_set: n_samples must be >= 1");
  params.validate();
  Rng rng(rng_seed);
  FeasibleSetEstimate est;
  est.n_samples = n_samples;
  for (std::size_t k = 0; k < n_samples; ++k) {
    auto x = sample_box(params, rng);
    const auto start = LeverageState::make(x, params);
    if (!start.feasible()) continue;
    const auto trace = iterate(start, params, horizon, 1);
    if (!trace.violation) est.survivors.push_back(std::move(x));
  }
  est.survival_fraction =
      static_cast<double>(est.survivors.size()) / static_cast<double>(n_samples);
  return est;
}

}  // namespace levdyn
