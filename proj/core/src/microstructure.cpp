#include "levdyn/microstructure.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace levdyn {

void MicroParams::validate() const {
  base.validate();
  if (n_intraday < 2) throw ParamError("n_intraday must be >= 2");
  if (horizon == 0) throw ParamError("horizon must be >= 1");
  if (!(equity_total > 0.0)) throw ParamError("equity_total must be > 0");
}

MicroState initial_micro_state(const MicroParams& params, std::span<const double> lambdas,
                               std::optional<std::vector<double>> equities) {
  params.validate();
  const std::size_t n = params.base.n_banks();
  if (lambdas.size() != n) throw ParamError("initial leverages: wrong bank count");
  const auto start = LeverageState::make({lambdas.begin(), lambdas.end()}, params.base);
  if (!start.feasible()) {
    throw InfeasibleStateError(start.violated, "run_micro: infeasible initial leverages");
  }
  MicroState s;
  s.lambdas.assign(lambdas.begin(), lambdas.end());
  if (equities) {
    if (equities->size() != n) throw ParamError("initial equities: wrong bank count");
    s.equities = *equities;
  } else {
    s.equities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.equities[i] = params.base.pis[i] * params.equity_total / s.lambdas[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.equities[i] > 0.0)) {
      throw InsolvencyError(0, i, "initial equity of bank " + std::to_string(i) + " is not positive");
    }
  }
  s.sigma_e_sq.resize(n);
  const double a = params.base.market.alpha;
  for (std::size_t i = 0; i < n; ++i) s.sigma_e_sq[i] = 1.0 / (a * a * s.lambdas[i] * s.lambdas[i]);
  begin_period(s);
  return s;
}

namespace {

void refresh_weights(MicroState& s) {
  const double total = std::accumulate(s.target_assets.begin(), s.target_assets.end(), 0.0);
  s.weights.resize(s.target_assets.size());
  for (std::size_t i = 0; i < s.weights.size(); ++i) s.weights[i] = s.target_assets[i] / total;
}

}  // namespace

void begin_period(MicroState& s) {
  s.target_assets.resize(s.lambdas.size());
  for (std::size_t i = 0; i < s.lambdas.size(); ++i) s.target_assets[i] = s.lambdas[i] * s.equities[i];
  refresh_weights(s);
  s.period_start_weights = s.weights;
  s.pi_drift_max = 0.0;
}

double intraday_ar_coefficient(const MicroState& s, const MicroParams& params) {
  const double gamma = params.base.market.gamma;
  if (params.weights == WeightMode::configured) {
    double num = 0.0;
    for (std::size_t i = 0; i < s.lambdas.size(); ++i) num += (s.lambdas[i] - 1.0) * params.base.pis[i];
    return num / gamma;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
    num += (s.lambdas[i] - 1.0) * s.target_assets[i];
    den += s.target_assets[i];
  }
  return num / (gamma * den);
}

double advance_intraday(MicroState& s, const MicroParams& params, Rng& rng) {
  const double phi = intraday_ar_coefficient(s, params);
  double eps = 0.0;
  if (!params.zero_noise) {
    std::normal_distribution<double> noise(0.0, std::sqrt(params.sigma_eps_step_sq()));
    eps = noise(rng);
  }
  const double r = phi * s.last_return + eps;
  for (std::size_t i = 0; i < s.equities.size(); ++i) {
    s.equities[i] += r * s.target_assets[i];
    if (!(s.equities[i] > 0.0)) {
      throw InsolvencyError(s.period, i,
                            "bank " + std::to_string(i) + " insolvent in period " +
                                std::to_string(s.period));
    }
  }
  for (std::size_t i = 0; i < s.equities.size(); ++i) s.target_assets[i] = s.lambdas[i] * s.equities[i];
  refresh_weights(s);
  for (std::size_t i = 0; i < s.weights.size(); ++i) {
    s.pi_drift_max = std::max(s.pi_drift_max, std::abs(s.weights[i] - s.period_start_weights[i]));
  }
  s.last_return = r;
  return r;
}

MicroState step_intraday(const MicroState& state, const MicroParams& params, Rng& rng) {
  MicroState next = state;
  advance_intraday(next, params, rng);
  return next;
}

PeriodClose close_period_with_variance(double sigma_e_hat_sq, double phi,
                                       std::span<const double> sigma_e_sq,
                                       std::span<const double> omegas,
                                       const MarketParams& market) {
  PeriodClose out;
  out.phi_hat = phi;
  out.sigma_e_hat_sq = sigma_e_hat_sq;
  out.sigma_e_sq.resize(sigma_e_sq.size());
  out.lambdas.resize(sigma_e_sq.size());
  for (std::size_t i = 0; i < sigma_e_sq.size(); ++i) {
    const double w = omegas[i];
    double v = (w == 1.0) ? sigma_e_sq[i] : w * sigma_e_sq[i] + (1.0 - w) * sigma_e_hat_sq;
    if (v < kSigmaFloor) {
      v = kSigmaFloor;
      out.floored = true;
    }
    out.sigma_e_sq[i] = v;
    out.lambdas[i] = 1.0 / (market.alpha * std::sqrt(v));
  }
  return out;
}

PeriodClose close_period(std::span<const double> returns, double r_before,
                         std::span<const double> sigma_e_sq, std::span<const double> omegas,
                         const MarketParams& market) {
  const std::size_t n = returns.size();
  if (n < 2) throw ParamError("close_period: need at least two intraday returns");
  double sxy = 0.0, sxx = 0.0;
  double prev = r_before;
  for (double r : returns) {
    sxy += r * prev;
    sxx += prev * prev;
    prev = r;
  }
  // no variation at all: nothing to estimate, treat the fit as phi = 0
  const double phi = (sxx > 0.0) ? sxy / sxx : 0.0;
  if (!(std::abs(phi) < 1.0)) {
    throw NonstationarityError(0, phi, "close_period: estimated |phi| >= 1");
  }
  double sse = 0.0;
  prev = r_before;
  for (double r : returns) {
    const double e = r - phi * prev;
    sse += e * e;
    prev = r;
  }
  const double sigma_eps_hat_sq = sse / static_cast<double>(n);
  const double aggregated = static_cast<double>(n) * sigma_eps_hat_sq / ((1.0 - phi) * (1.0 - phi));
  auto out = close_period_with_variance(aggregated, phi, sigma_e_sq, omegas, market);
  out.sigma_eps_hat_sq = sigma_eps_hat_sq;
  return out;
}

MicroRun run_micro(const MicroParams& params, std::span<const double> initial_lambdas,
                   std::optional<std::vector<double>> equities) {
  MicroState s = initial_micro_state(params, initial_lambdas, std::move(equities));
  const auto& market = params.base.market;
  const std::size_t n_banks = params.base.n_banks();
  Rng rng(params.rng_seed);

  MicroRun run;
  run.stochastic.push_back(s.lambdas);
  run.deterministic.push_back(s.lambdas);
  run.pi_drift_max.push_back(0.0);
  run.phi_hat.push_back(std::numeric_limits<double>::quiet_NaN());
  run.sigma_hat_sq.push_back(std::numeric_limits<double>::quiet_NaN());

  std::optional<LeverageState> det =
      LeverageState::make({initial_lambdas.begin(), initial_lambdas.end()}, params.base);
  std::vector<double> returns(params.n_intraday);

  for (std::size_t t = 1; t <= params.horizon; ++t) {
    s.period = t;
    begin_period(s);
    const double phi = intraday_ar_coefficient(s, params);
    if (!(std::abs(phi) < 1.0)) {
      throw NonstationarityError(t, phi, "run_micro: intraday AR(1) coefficient |phi| >= 1 in period " +
                                             std::to_string(t));
    }
    if (params.zero_noise) {
      s.last_return = 0.0;
    } else {
      const double step_var = params.sigma_eps_step_sq() / (1.0 - phi * phi);
      s.last_return = std::normal_distribution<double>(0.0, std::sqrt(step_var))(rng);
    }
    const double r_before = s.last_return;
    for (std::size_t k = 0; k < params.n_intraday; ++k) returns[k] = advance_intraday(s, params, rng);

    PeriodClose close;
    if (params.variance == VarianceMode::analytic) {
      close = close_period_with_variance(market.sigma_eps_sq / ((1.0 - phi) * (1.0 - phi)), phi,
                                         s.sigma_e_sq, params.base.omegas, market);
    } else {
      try {
        close = close_period(returns, r_before, s.sigma_e_sq, params.base.omegas, market);
      } catch (const NonstationarityError& e) {
        throw NonstationarityError(t, e.phi(), "run_micro: estimated |phi| >= 1 in period " +
                                                   std::to_string(t));
      }
    }
    run.floored = run.floored || close.floored;
    s.sigma_e_sq = close.sigma_e_sq;
    s.lambdas = close.lambdas;

    run.stochastic.push_back(s.lambdas);
    run.pi_drift_max.push_back(s.pi_drift_max);
    run.phi_hat.push_back(close.phi_hat);
    run.sigma_hat_sq.push_back(close.sigma_e_hat_sq);

    if (det && det->feasible()) {
      det = eval_coupled(*det, params.base);
    }
    if (det && det->feasible()) {
      run.deterministic.push_back(det->lambdas);
    } else {
      det.reset();
      run.deterministic.push_back(
          std::vector<double>(n_banks, std::numeric_limits<double>::quiet_NaN()));
    }
  }
  return run;
}

double rms_deviation(const MicroRun& run) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 1; t < run.stochastic.size(); ++t) {
    for (std::size_t i = 0; i < run.stochastic[t].size(); ++i) {
      const double d = run.stochastic[t][i] - run.deterministic[t][i];
      sum += d * d;
      ++count;
    }
  }
  return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

}  // namespace levdyn
