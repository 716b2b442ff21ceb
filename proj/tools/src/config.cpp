#include "levdyn_cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace levdyn::cli {

namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

const char* kind(const Json& j) {
  if (j.is_object()) return "object";
  if (j.is_array()) return "array";
  if (j.is_string()) return "string";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  return "null";
}

void check_against(const Json& user, const Json& schema, const std::string& path) {
  if (schema.is_null()) {
    if (user.is_object())
      throw ConfigError(path, std::nullopt, "key '" + path + "': object not allowed here");
    return;
  }
  if (schema.is_object()) {
    if (!user.is_object())
      throw ConfigError(path, std::nullopt,
                        "key '" + path + "': expected object, got " + kind(user));
    for (const auto& [k, v] : user.items()) {
      const std::string p = join(path, k);
      if (!schema.contains(k)) throw ConfigError(p, std::nullopt, "unknown key '" + p + "'");
      check_against(v, schema.at(k), p);
    }
    return;
  }
  if (user.is_null()) return;  // explicit null resets an optional value
  const bool same = (schema.is_number() && user.is_number()) ||
                    (schema.is_string() && user.is_string()) ||
                    (schema.is_boolean() && user.is_boolean()) ||
                    (schema.is_array() && user.is_array());
  if (!same)
    throw ConfigError(path, std::nullopt,
                      "key '" + path + "': expected " + kind(schema) + ", got " + kind(user));
  if (user.is_array()) {
    for (std::size_t i = 0; i < user.size(); ++i)
      if (!user[i].is_number())
        throw ConfigError(path, std::nullopt,
                          "key '" + path + "[" + std::to_string(i) + "]': expected number");
  }
}

void deep_merge(Json& base, const Json& patch) {
  for (const auto& [k, v] : patch.items()) {
    if (v.is_object() && base.contains(k) && base[k].is_object()) {
      deep_merge(base[k], v);
    } else {
      base[k] = v;
    }
  }
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

Json default_config() {
  return Json::parse(R"({
    "model": {"alpha": 1.64, "gamma": 100.0, "sigma_eps_sq": 2.25e-6,
              "omegas": [0.5, 0.3], "pis": [0.5, 0.5]},
    "run": {"transient": 1000, "record": 800, "seed": null},
    "simulate": {"initial": null, "transient": 0},
    "sweep": {"axis": "omega", "lo": 0.0, "hi": 1.0, "resolution": 200,
              "initials_per_point": 3, "lyapunov_steps": 2000, "p_max": 64,
              "period_tol": 1e-7},
    "lyapunov": {"initial": null, "x0": 50.0, "steps": 100000, "protocol": null,
                 "grid_lo": 0.0, "grid_hi": 1.0, "grid_resolution": 0},
    "attractor": {"initial": null, "n_points": 100000},
    "boxdim": {"cloud_csv": null, "eps_max": 0.125, "eps_ratio": 0.70710678118654752,
               "n_scales": 12, "fit_lo": null, "fit_hi": null, "max_slope_spread": 0.1},
    "skew": {"omega1": 0.5, "omega2": 0.3, "forcing_x0": 50.0, "depth": 2000,
             "tol": 1e-10, "history": null, "history_constant": null, "present": null},
    "micro": {"n_intraday": 1000, "horizon": 50, "equity_total": 1.0,
              "weights": "tracked", "variance": "estimated", "zero_noise": false,
              "initial": null, "equities": null},
    "stability": {"omega1_lo": 0.3, "omega1_hi": 1.0, "omega1_resolution": 20,
                  "omega2_lo": 0.3, "omega2_hi": 1.0, "omega2_resolution": 20,
                  "pi1": 0.5, "initials_per_point": 3, "lyapunov_steps": 2000,
                  "p_max": 64, "period_tol": 1e-7}
  })");
}

std::vector<std::string> preset_names() { return {"omega-sweep", "pi1-sweep", "omega1-sweep", "attractor"}; }

Json preset_patch(std::string_view name) {
  if (name == "omega-sweep")
    return Json::parse(R"({"model": {"omegas": [0.5], "pis": [1.0]},
      "run": {"transient": 1000, "record": 800},
      "sweep": {"axis": "omega", "lo": 0.0, "hi": 1.0, "resolution": 800}})");
  if (name == "pi1-sweep")
    return Json::parse(R"({"model": {"omegas": [0.5, 0.3], "pis": [0.5, 0.5]},
      "run": {"transient": 1000, "record": 500},
      "sweep": {"axis": "pi1", "lo": 0.0, "hi": 1.0, "resolution": 500}})");
  if (name == "omega1-sweep")
    return Json::parse(R"({"model": {"omegas": [0.5, 0.4], "pis": [0.5, 0.5]},
      "run": {"transient": 1000, "record": 800},
      "sweep": {"axis": "omega1", "lo": 0.0, "hi": 1.0, "resolution": 800}})");
  if (name == "attractor")
    return Json::parse(R"({"model": {"omegas": [0.5, 0.3], "pis": [0.5, 0.5]},
      "run": {"transient": 1000},
      "attractor": {"n_points": 1000000}})");
  throw ConfigError("preset", std::nullopt, "unknown preset '" + std::string(name) + "'");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Config::Config(Json doc) : doc_(std::move(doc)), hash_(fnv1a_hex(doc_.dump())) {}

const Json& Config::at(std::string_view path) const {
  const Json* node = &doc_;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto dot = path.find('.', start);
    const auto key = std::string(path.substr(start, dot == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : dot - start));
    if (!node->is_object() || !node->contains(key))
      throw ConfigError(std::string(path), std::nullopt,
                        "missing key '" + std::string(path) + "'");
    node = &(*node)[key];
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return *node;
}

bool Config::is_set(std::string_view path) const { return !at(path).is_null(); }

double Config::number(std::string_view path) const {
  const Json& j = at(path);
  if (!j.is_number())
    throw ConfigError(std::string(path), std::nullopt,
                      "key '" + std::string(path) + "': expected number");
  return j.get<double>();
}

std::size_t Config::count(std::string_view path) const {
  const Json& j = at(path);
  const std::string p(path);
  if (!j.is_number()) throw ConfigError(p, std::nullopt, "key '" + p + "': expected integer");
  const double v = j.get<double>();
  if (!(v >= 0.0) || std::floor(v) != v || v > 9.0e15)
    throw ConfigError(p, std::nullopt, "key '" + p + "': expected non-negative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t Config::seed(std::string_view path) const {
  const Json& j = at(path);
  const std::string p(path);
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return j.get<std::uint64_t>();
  throw ConfigError(p, std::nullopt, "key '" + p + "': expected non-negative integer seed");
}

bool Config::flag(std::string_view path) const {
  const Json& j = at(path);
  if (!j.is_boolean())
    throw ConfigError(std::string(path), std::nullopt,
                      "key '" + std::string(path) + "': expected boolean");
  return j.get<bool>();
}

std::string Config::text(std::string_view path) const {
  const Json& j = at(path);
  if (!j.is_string())
    throw ConfigError(std::string(path), std::nullopt,
                      "key '" + std::string(path) + "': expected string");
  return j.get<std::string>();
}

std::vector<double> Config::numbers(std::string_view path) const {
  const Json& j = at(path);
  const std::string p(path);
  if (!j.is_array()) throw ConfigError(p, std::nullopt, "key '" + p + "': expected array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(p, std::nullopt, "key '" + p + "': expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::optional<std::uint64_t> Config::run_seed() const {
  if (!is_set("run.seed")) return std::nullopt;
  return seed("run.seed");
}

std::uint64_t Config::require_seed(std::string_view command) const {
  auto s = run_seed();
  if (!s)
    throw ConfigError("run.seed", std::nullopt,
                      "key 'run.seed' is required for " + std::string(command));
  return *s;
}

MarketParams Config::market() const {
  MarketParams m;
  m.alpha = number("model.alpha");
  m.gamma = number("model.gamma");
  m.sigma_eps_sq = number("model.sigma_eps_sq");
  try {
    m.validate();
  } catch (const ParamError& e) {
    throw ConfigError("model", std::nullopt, std::string("key 'model': ") + e.what());
  }
  return m;
}

ModelParams Config::model() const {
  ModelParams p;
  p.market = market();
  p.omegas = numbers("model.omegas");
  p.pis = numbers("model.pis");
  if (p.omegas.empty())
    throw ConfigError("model.omegas", std::nullopt, "key 'model.omegas': at least one bank");
  if (p.pis.size() != p.omegas.size())
    throw ConfigError("model.pis", std::nullopt,
                      "key 'model.pis': length " + std::to_string(p.pis.size()) +
                          " differs from model.omegas length " +
                          std::to_string(p.omegas.size()));
  for (double w : p.omegas)
    if (!(w >= 0.0 && w <= 1.0))
      throw ConfigError("model.omegas", std::nullopt,
                        "key 'model.omegas': values must lie in [0, 1]");
  double sum = 0.0;
  for (double w : p.pis) {
    if (!(w >= 0.0))
      throw ConfigError("model.pis", std::nullopt, "key 'model.pis': values must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "key 'model.pis': weights must sum to 1, got " << sum;
    throw ConfigError("model.pis", std::nullopt, msg.str());
  }
  try {
    p.validate();
  } catch (const ParamError& e) {
    throw ConfigError("model", std::nullopt, std::string("key 'model': ") + e.what());
  }
  return p;
}

Config load_config(std::string_view text, const std::optional<std::string>& preset) {
  Json user;
  try {
    user = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("", line, "line " + std::to_string(line) + ": " + e.what());
  }
  if (!user.is_object()) throw ConfigError("", std::nullopt, "config must be a JSON object");
  Json doc = default_config();
  check_against(user, doc, "");
  if (preset) deep_merge(doc, preset_patch(*preset));
  deep_merge(doc, user);
  return Config(std::move(doc));
}

Config load_config_file(const std::string& path, const std::optional<std::string>& preset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", std::nullopt, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str(), preset);
}

}  // namespace levdyn::cli
