#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

#include "levdyn/attractor.hpp"
#include "levdyn/csv.hpp"
#include "levdyn/logging.hpp"
#include "levdyn/lyapunov.hpp"
#include "levdyn/microstructure.hpp"
#include "levdyn/orbit.hpp"
#include "levdyn/parallel.hpp"
#include "levdyn/random.hpp"
#include "levdyn/skew_product.hpp"
#include "levdyn/sweep.hpp"
#include "levdyn/version.hpp"

namespace levdyn::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// stream ids for seeded initial conditions
constexpr std::uint64_t kStreamSimulate = 11;
constexpr std::uint64_t kStreamLyapunov = 12;
constexpr std::uint64_t kStreamAttractor = 13;
constexpr std::uint64_t kStreamMicro = 14;

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string seed_text(std::optional<std::uint64_t> seed) {
  return seed ? std::to_string(*seed) : std::string("none");
}

void csv_provenance(CsvWriter& w, const Context& ctx, std::string_view command) {
  w.comment("levdyn " + std::string(kVersion) + " " + std::string(command));
  w.comment("config_hash fnv1a64:" + ctx.config.hash());
  w.comment("seed " + seed_text(ctx.config.run_seed()));
  w.comment("generated " + timestamp());
}

Json json_provenance(const Context& ctx, std::string_view command) {
  Json p;
  p["tool"] = "levdyn";
  p["version"] = kVersion;
  p["command"] = command;
  p["config_hash"] = "fnv1a64:" + ctx.config.hash();
  auto seed = ctx.config.run_seed();
  p["seed"] = seed ? Json(*seed) : Json(nullptr);
  p["generated"] = timestamp();
  return p;
}

void emit_json(const Context& ctx, const Json& j) { ctx.out << j.dump(2) << '\n'; }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/// Explicit initial, a uniform draw from the box when seeded, or evenly
/// spaced leverages 1 + gamma (i + 1) / (N + 1).
std::vector<double> resolve_initial(const Config& cfg, std::string_view key,
                                    const ModelParams& params, std::uint64_t stream) {
  const std::size_t n = params.n_banks();
  if (cfg.is_set(key)) {
    auto x = cfg.numbers(key);
    if (x.size() != n)
      throw ConfigError(std::string(key), std::nullopt,
                        "key '" + std::string(key) + "': expected " + std::to_string(n) +
                            " values, got " + std::to_string(x.size()));
    return x;
  }
  if (auto seed = cfg.run_seed()) {
    Rng rng(derive_seed(*seed, stream));
    return sample_box(params, rng);
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = 1.0 + params.market.gamma * static_cast<double>(i + 1) / static_cast<double>(n + 1);
  return x;
}

LeverageState feasible_initial(const Config& cfg, std::string_view key, const ModelParams& p,
                               std::uint64_t stream) {
  auto state = LeverageState::make(resolve_initial(cfg, key, p, stream), p);
  if (!state.feasible())
    throw InfeasibleStateError(state.violated, "initial state violates " +
                                                   std::string(to_string(state.violated)));
  return state;
}

}  // namespace

int cmd_simulate(const Context& ctx) {
  const auto& cfg = ctx.config;
  const ModelParams params = cfg.model();
  const auto initial = feasible_initial(cfg, "simulate.initial", params, kStreamSimulate);
  const std::size_t transient = cfg.count("simulate.transient");
  const std::size_t record = cfg.count("run.record");
  const auto trace = iterate(initial, params, transient, record);
  const std::size_t n = params.n_banks();

  CsvWriter w(ctx.out);
  csv_provenance(w, ctx, "simulate");
  std::vector<std::string> cols{"t"};
  for (std::size_t i = 0; i < n; ++i) cols.push_back("lambda_" + std::to_string(i + 1));
  cols.push_back("sync_12");
  cols.push_back("feasible");
  w.header(cols);

  auto row = [&](std::size_t t, const LeverageState& s, bool ok) {
    w.cell(t);
    for (double v : s.lambdas) w.cell(v);
    w.cell(n >= 2 ? sync_metric(s, 0, 1) : kNaN);
    w.cell(ok ? 1 : 0);
    w.end_row();
  };
  for (std::size_t k = 0; k < trace.recorded.size(); ++k)
    row(transient + k, trace.recorded[k], true);
  if (trace.violation) {
    const auto& v = *trace.violation;
    if (v.step >= transient) row(v.step, v.state, false);
    log::error("simulate: orbit violated " + std::string(to_string(v.constraint)) +
               " at step " + std::to_string(v.step));
    return kExitConstraint;
  }
  return kExitOk;
}

namespace {

SweepSpec sweep_spec(const Config& cfg) {
  SweepSpec s;
  const auto axis_name = cfg.text("sweep.axis");
  const auto axis = parse_sweep_axis(axis_name);
  if (!axis)
    throw ConfigError("sweep.axis", std::nullopt,
                      "key 'sweep.axis': unknown axis '" + axis_name +
                          "' (omega, pi1, omega1, omega2)");
  s.axis = *axis;
  s.lo = cfg.number("sweep.lo");
  s.hi = cfg.number("sweep.hi");
  s.resolution = cfg.count("sweep.resolution");
  s.fixed = cfg.model();
  s.transient = cfg.count("run.transient");
  s.record = cfg.count("run.record");
  s.initials_per_point = cfg.count("sweep.initials_per_point");
  s.rng_seed = cfg.require_seed("bifurcate");
  s.lyapunov_steps = cfg.count("sweep.lyapunov_steps");
  s.p_max = cfg.count("sweep.p_max");
  s.period_tol = cfg.number("sweep.period_tol");
  if (s.resolution < 2)
    throw ConfigError("sweep.resolution", std::nullopt,
                      "key 'sweep.resolution': need at least 2 grid points");
  return s;
}

}  // namespace

int cmd_bifurcate(const Context& ctx) {
  const SweepSpec spec = sweep_spec(ctx.config);
  spec.validate();
  log::info("bifurcate: " + std::string(to_string(spec.axis)) + " sweep, " +
            std::to_string(spec.resolution) + " points");
  const auto records = run_sweep(spec, ctx.inv.workers);

  CsvWriter w(ctx.out);
  csv_provenance(w, ctx, "bifurcate");
  w.header({"index", "param", "classification", "period", "lyapunov_top", "survival_fraction",
            "branch", "sample", "bank", "lambda"});
  std::size_t infeasible = 0;
  for (const auto& rec : records) {
    auto prefix = [&] {
      w.cell(rec.index).cell(rec.param_value).cell(describe(rec.classification));
      w.cell(rec.classification.period).cell(rec.lyapunov_top).cell(rec.survival_fraction);
    };
    if (rec.branches.empty()) {
      ++infeasible;
      prefix();
      w.cell(-1).cell(-1).cell(-1).cell(kNaN);
      w.end_row();
      continue;
    }
    for (std::size_t b = 0; b < rec.branches.size(); ++b) {
      const auto& br = rec.branches[b];
      const std::size_t k_max = br.samples.empty() ? 0 : br.samples.front().size();
      for (std::size_t k = 0; k < k_max; ++k) {
        for (std::size_t bank = 0; bank < br.samples.size(); ++bank) {
          prefix();
          w.cell(b).cell(k).cell(bank).cell(br.samples[bank][k]);
          w.end_row();
        }
      }
    }
  }
  if (2 * infeasible > records.size()) {
    log::error("bifurcate: " + std::to_string(infeasible) + " of " +
               std::to_string(records.size()) + " grid points infeasible");
    return kExitConstraint;
  }
  return kExitOk;
}

int cmd_lyapunov(const Context& ctx) {
  const auto& cfg = ctx.config;
  const ModelParams params = cfg.model();
  std::size_t transient = cfg.count("run.transient");
  std::size_t steps = cfg.count("lyapunov.steps");
  if (cfg.is_set("lyapunov.protocol")) {
    const auto name = cfg.text("lyapunov.protocol");
    LyapunovProtocol p;
    if (name == "short") {
      p = LyapunovProtocol::short_run();
    } else if (name == "production") {
      p = LyapunovProtocol::production();
    } else {
      throw ConfigError("lyapunov.protocol", std::nullopt,
                        "key 'lyapunov.protocol': expected 'short' or 'production'");
    }
    transient = p.transient;
    steps = p.steps;
  }
  if (steps == 0)
    throw ConfigError("lyapunov.steps", std::nullopt, "key 'lyapunov.steps': must be >= 1");

  const std::size_t grid_n = cfg.count("lyapunov.grid_resolution");
  if (grid_n > 0) {
    if (grid_n < 2)
      throw ConfigError("lyapunov.grid_resolution", std::nullopt,
                        "key 'lyapunov.grid_resolution': need at least 2 grid points");
    const double lo = cfg.number("lyapunov.grid_lo");
    const double hi = cfg.number("lyapunov.grid_hi");
    if (!(lo >= 0.0 && hi <= 1.0 && lo < hi))
      throw ConfigError("lyapunov.grid_lo", std::nullopt,
                        "keys 'lyapunov.grid_lo'/'lyapunov.grid_hi': need 0 <= lo < hi <= 1");
    const double x0 = cfg.number("lyapunov.x0");
    struct Cell {
      double omega, exponent;
      bool saturated, ok;
    };
    const auto cells = parallel_map(grid_n, ctx.inv.workers, [&](std::size_t i) {
      const double w = i + 1 == grid_n
                           ? hi
                           : lo + (hi - lo) * (static_cast<double>(i) / double(grid_n - 1));
      try {
        const auto est = lyapunov_1d(w, params.market, x0, transient, steps);
        return Cell{w, est.top(), est.saturated, true};
      } catch (const OrbitViolationError&) {
        return Cell{w, kNaN, false, false};
      }
    });
    CsvWriter wr(ctx.out);
    csv_provenance(wr, ctx, "lyapunov");
    wr.header({"omega", "exponent", "saturated", "status"});
    std::size_t bad = 0;
    for (const auto& c : cells) {
      bad += c.ok ? 0 : 1;
      wr.cell(c.omega).cell(c.exponent).cell(c.saturated ? 1 : 0);
      wr.cell(c.ok ? std::string_view("ok") : std::string_view("infeasible"));
      wr.end_row();
    }
    return 2 * bad > cells.size() ? kExitConstraint : kExitOk;
  }

  LyapunovEstimate est;
  if (params.n_banks() == 1) {
    est = lyapunov_1d(params.omegas[0], params.market, cfg.number("lyapunov.x0"), transient,
                      steps);
  } else {
    const auto initial = feasible_initial(cfg, "lyapunov.initial", params, kStreamLyapunov);
    est = lyapunov_spectrum(initial, params, transient, steps);
  }
  Json j;
  j["provenance"] = json_provenance(ctx, "lyapunov");
  Json ex = Json::array();
  for (double v : est.exponents) ex.push_back(number_or_null(v));
  j["exponents"] = ex;
  j["top"] = number_or_null(est.top());
  j["steps"] = est.steps_used;
  j["transient"] = est.transient;
  j["saturated"] = est.saturated;
  emit_json(ctx, j);
  return kExitOk;
}

namespace {

AttractorCloud capture_from_config(const Config& cfg) {
  const ModelParams params = cfg.model();
  if (params.n_banks() < 2)
    throw ConfigError("model.omegas", std::nullopt,
                      "key 'model.omegas': attractor needs at least two banks");
  const auto initial = feasible_initial(cfg, "attractor.initial", params, kStreamAttractor);
  const std::size_t n = cfg.count("attractor.n_points");
  if (n == 0)
    throw ConfigError("attractor.n_points", std::nullopt,
                      "key 'attractor.n_points': must be >= 1");
  return capture_cloud(initial, params, cfg.count("run.transient"), n);
}

}  // namespace

int cmd_attractor(const Context& ctx) {
  const auto cloud = capture_from_config(ctx.config);
  CsvWriter w(ctx.out);
  csv_provenance(w, ctx, "attractor");
  w.header({"lambda1", "lambda2"});
  for (const auto& p : cloud.points) {
    w.cell(p[0]).cell(p[1]);
    w.end_row();
  }
  return kExitOk;
}

int cmd_boxdim(const Context& ctx) {
  const auto& cfg = ctx.config;
  std::vector<Point2> points;
  std::string source;
  if (cfg.is_set("boxdim.cloud_csv")) {
    source = cfg.text("boxdim.cloud_csv");
    std::ifstream in(source);
    if (!in) throw ConfigError("boxdim.cloud_csv", std::nullopt, "cannot open '" + source + "'");
    const auto table = read_csv(in);
    const auto c1 = table.column("lambda1");
    const auto c2 = table.column("lambda2");
    points.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r)
      points.push_back({table.number(r, c1), table.number(r, c2)});
  } else {
    source = "captured";
    points = capture_from_config(cfg).points;
  }

  BoxCountOptions opt;
  opt.eps_max = cfg.number("boxdim.eps_max");
  opt.eps_ratio = cfg.number("boxdim.eps_ratio");
  opt.n_scales = cfg.count("boxdim.n_scales");
  opt.max_slope_spread = cfg.number("boxdim.max_slope_spread");
  opt.workers = ctx.inv.workers;
  if (cfg.is_set("boxdim.fit_lo") != cfg.is_set("boxdim.fit_hi"))
    throw ConfigError("boxdim.fit_lo", std::nullopt,
                      "keys 'boxdim.fit_lo' and 'boxdim.fit_hi' must be set together");
  if (cfg.is_set("boxdim.fit_lo"))
    opt.fit_range = std::pair{cfg.count("boxdim.fit_lo"), cfg.count("boxdim.fit_hi")};

  const auto fit = box_dimension(std::span<const Point2>(points), opt);
  Json j;
  j["provenance"] = json_provenance(ctx, "boxdim");
  j["source"] = source;
  j["n_points"] = points.size();
  j["slope"] = fit.slope;
  j["stderr"] = fit.stderr_slope;
  j["fit_range"] = {fit.fit_range.first, fit.fit_range.second};
  j["epsilons"] = fit.epsilons;
  j["counts"] = fit.counts;
  j["local_slopes"] = fit.local_slopes;
  emit_json(ctx, j);
  return kExitOk;
}

int cmd_fixedpoint(const Context& ctx) {
  const auto& cfg = ctx.config;
  const MarketParams market = cfg.market();
  const double omega1 = cfg.number("skew.omega1");
  const double tol = cfg.number("skew.tol");
  const std::size_t depth = cfg.count("skew.depth");
  if (!(omega1 >= 0.0 && omega1 < 1.0))
    throw ConfigError("skew.omega1", std::nullopt, "key 'skew.omega1': need 0 <= omega1 < 1");
  if (cfg.is_set("skew.history") && cfg.is_set("skew.history_constant"))
    throw ConfigError("skew.history", std::nullopt,
                      "keys 'skew.history' and 'skew.history_constant' are exclusive");

  Json j;
  j["provenance"] = json_provenance(ctx, "fixedpoint");
  j["omega1"] = omega1;

  ForcingHistory history;
  bool has_present = true;
  std::optional<double> closed_form;
  if (cfg.is_set("skew.history_constant")) {
    const double c = cfg.number("skew.history_constant");
    if (!(c >= 1.0 && c < market.cap()))
      throw ConfigError("skew.history_constant", std::nullopt,
                        "key 'skew.history_constant': need 1 <= c < 1 + gamma");
    history = explicit_history(std::vector<double>(depth + 2, c), depth, market);
    closed_form = (1.0 + market.gamma - c) /
                  (market.gamma * market.alpha * std::sqrt(market.sigma_eps_sq));
    j["source"] = "constant";
  } else if (cfg.is_set("skew.history")) {
    auto past = cfg.numbers("skew.history");  // newest first
    if (past.empty())
      throw ConfigError("skew.history", std::nullopt, "key 'skew.history': empty");
    for (double v : past)
      if (!(v >= 1.0 && v < market.cap()))
        throw ConfigError("skew.history", std::nullopt,
                          "key 'skew.history': values must lie in [1, 1 + gamma)");
    std::vector<double> chron(past.rbegin(), past.rend());
    has_present = cfg.is_set("skew.present");
    const double present = has_present ? cfg.number("skew.present") : past.front();
    chron.push_back(present);
    chron.push_back(present);
    history = explicit_history(std::move(chron), past.size(), market);
    j["source"] = "explicit";
  } else {
    const double omega2 = cfg.number("skew.omega2");
    history = make_forcing_history(omega2, market, cfg.number("skew.forcing_x0"),
                                   cfg.count("run.transient"), depth, 1);
    j["source"] = "forward_orbit";
    j["omega2"] = omega2;
  }

  const auto fp = random_fixed_point(history, omega1, tol);
  j["value"] = fp.value;
  j["truncation_depth"] = fp.truncation_depth;
  j["tail_bound"] = fp.tail_bound;
  if (closed_form) {
    j["closed_form"] = *closed_form;
    j["closed_form_error"] = std::abs(fp.value - *closed_form);
  }
  if (has_present) {
    const auto next = random_fixed_point(history.shifted(), omega1, tol);
    const double image = eval_fiber_map(fp.value, history.present(), omega1, market);
    j["residual"] = std::abs(image - next.value);
  } else {
    j["residual"] = nullptr;
  }
  emit_json(ctx, j);
  return kExitOk;
}

int cmd_micro(const Context& ctx) {
  const auto& cfg = ctx.config;
  MicroParams mp;
  mp.base = cfg.model();
  mp.n_intraday = cfg.count("micro.n_intraday");
  mp.horizon = cfg.count("micro.horizon");
  mp.rng_seed = cfg.require_seed("micro");
  mp.equity_total = cfg.number("micro.equity_total");
  mp.zero_noise = cfg.flag("micro.zero_noise");
  const auto wm = cfg.text("micro.weights");
  if (wm == "tracked") {
    mp.weights = WeightMode::tracked;
  } else if (wm == "configured") {
    mp.weights = WeightMode::configured;
  } else {
    throw ConfigError("micro.weights", std::nullopt,
                      "key 'micro.weights': expected 'tracked' or 'configured'");
  }
  const auto vm = cfg.text("micro.variance");
  if (vm == "estimated") {
    mp.variance = VarianceMode::estimated;
  } else if (vm == "analytic") {
    mp.variance = VarianceMode::analytic;
  } else {
    throw ConfigError("micro.variance", std::nullopt,
                      "key 'micro.variance': expected 'estimated' or 'analytic'");
  }
  mp.validate();
  const auto initial = feasible_initial(cfg, "micro.initial", mp.base, kStreamMicro);
  std::optional<std::vector<double>> equities;
  if (cfg.is_set("micro.equities")) {
    equities = cfg.numbers("micro.equities");
    if (equities->size() != mp.base.n_banks())
      throw ConfigError("micro.equities", std::nullopt,
                        "key 'micro.equities': one value per bank required");
  }
  const auto run = run_micro(mp, initial.lambdas, equities);

  CsvWriter w(ctx.out);
  csv_provenance(w, ctx, "micro");
  w.header({"period", "bank", "lambda_stochastic", "lambda_deterministic", "pi_drift_max",
            "phi_hat", "sigma_hat_sq"});
  for (std::size_t t = 0; t < run.stochastic.size(); ++t) {
    for (std::size_t i = 0; i < run.stochastic[t].size(); ++i) {
      w.cell(t).cell(i + 1).cell(run.stochastic[t][i]).cell(run.deterministic[t][i]);
      w.cell(run.pi_drift_max[t]).cell(run.phi_hat[t]).cell(run.sigma_hat_sq[t]);
      w.end_row();
    }
  }
  if (run.floored) log::warn("micro: variance estimate hit the floor");
  return kExitOk;
}

int cmd_stability_map(const Context& ctx) {
  const auto& cfg = ctx.config;
  StabilityMapSpec s;
  s.omega1_lo = cfg.number("stability.omega1_lo");
  s.omega1_hi = cfg.number("stability.omega1_hi");
  s.omega2_lo = cfg.number("stability.omega2_lo");
  s.omega2_hi = cfg.number("stability.omega2_hi");
  s.omega1_resolution = cfg.count("stability.omega1_resolution");
  s.omega2_resolution = cfg.count("stability.omega2_resolution");
  s.pi1 = cfg.number("stability.pi1");
  s.market = cfg.market();
  s.transient = cfg.count("run.transient");
  s.record = cfg.count("run.record");
  s.initials_per_point = cfg.count("stability.initials_per_point");
  s.rng_seed = cfg.require_seed("stability-map");
  s.lyapunov_steps = cfg.count("stability.lyapunov_steps");
  s.p_max = cfg.count("stability.p_max");
  s.period_tol = cfg.number("stability.period_tol");
  if (s.omega1_resolution < 2 || s.omega2_resolution < 2)
    throw ConfigError("stability.omega1_resolution", std::nullopt,
                      "keys 'stability.omega{1,2}_resolution': need at least 2 grid points");

  const auto map = stability_map(s, ctx.inv.workers);
  CsvWriter w(ctx.out);
  csv_provenance(w, ctx, "stability-map");
  w.header({"omega1", "omega2", "classification", "period", "lyapunov_top",
            "survival_fraction"});
  std::size_t infeasible = 0;
  for (const auto& c : map.cells) {
    if (c.classification.regime == Regime::infeasible) ++infeasible;
    w.cell(c.omega1).cell(c.omega2).cell(describe(c.classification));
    w.cell(c.classification.period).cell(c.lyapunov_top).cell(c.survival_fraction);
    w.end_row();
  }
  return 2 * infeasible > map.cells.size() ? kExitConstraint : kExitOk;
}

}  // namespace levdyn::cli
