#include "levdyn_cli/app.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "levdyn/errors.hpp"
#include "levdyn/logging.hpp"
#include "levdyn/parallel.hpp"

namespace levdyn::cli {

namespace {

using Handler = std::function<int(const Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"simulate", cmd_simulate},   {"bifurcate", cmd_bifurcate},
      {"lyapunov", cmd_lyapunov},   {"attractor", cmd_attractor},
      {"boxdim", cmd_boxdim},       {"fixedpoint", cmd_fixedpoint},
      {"micro", cmd_micro},         {"stability-map", cmd_stability_map},
  };
  return h;
}

int report(std::ostream& err, int code, std::string_view kind, std::string_view message) {
  err << "levdyn: " << kind << " error: " << message << '\n';
  return code;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : handlers()) out.push_back(name);
  return out;
}

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const auto it = handlers().find(inv.command);
  if (it == handlers().end())
    return report(err, kExitConfig, "usage", "unknown command '" + inv.command + "'");
  try {
    const Config cfg = load_config_file(inv.config_path, inv.preset);
    std::ofstream file;
    std::ostream* sink = &out;
    if (inv.out_path) {
      file.open(*inv.out_path, std::ios::binary | std::ios::trunc);
      if (!file) return report(err, kExitRuntime, "io", "cannot write '" + *inv.out_path + "'");
      sink = &file;
    }
    const int code = it->second(Context{cfg, inv, *sink, err});
    sink->flush();
    if (!*sink) return report(err, kExitRuntime, "io", "write failed");
    return code;
  } catch (const ConfigError& e) {
    return report(err, kExitConfig, "config", e.what());
  } catch (const ParamError& e) {
    return report(err, kExitConfig, "config", e.what());
  } catch (const EmptyGridError& e) {
    return report(err, kExitConfig, "config", e.what());
  } catch (const InfeasibleStateError& e) {
    return report(err, kExitConstraint, "constraint", e.what());
  } catch (const OrbitViolationError& e) {
    return report(err, kExitConstraint, "constraint", e.what());
  } catch (const InsolvencyError& e) {
    return report(err, kExitConstraint, "constraint", e.what());
  } catch (const NonstationarityError& e) {
    return report(err, kExitConstraint, "constraint", e.what());
  } catch (const std::exception& e) {
    return report(err, kExitRuntime, "runtime", e.what());
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  log::set_level(log::level_from_env());
  CLI::App app{"levdyn: leverage-targeting bank dynamics toolkit"};
  app.require_subcommand(1);
  Invocation inv;
  inv.workers = default_workers();
  std::string preset;

  static const std::map<std::string, std::string> blurbs{
      {"simulate", "iterate the coupled map and write the leverage trace"},
      {"bifurcate", "one-parameter sweep with regime classification"},
      {"lyapunov", "Lyapunov exponents at one point or along an omega grid"},
      {"attractor", "capture a two-bank attractor point cloud"},
      {"boxdim", "box-counting dimension of a point cloud"},
      {"fixedpoint", "random fixed point of the skew product for a forcing history"},
      {"micro", "intraday microstructure simulation against the coupled map"},
      {"stability-map", "regime classification over an (omega1, omega2) grid"},
  };
  for (const auto& name : command_names()) {
    const auto b = blurbs.find(name);
    auto* sub = app.add_subcommand(name, b == blurbs.end() ? std::string() : b->second);
    sub->add_option("--config", inv.config_path, "JSON configuration file")->required();
    sub->add_option("--out", inv.out_path, "output file (default stdout)");
    sub->add_option("--workers", inv.workers, "worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_option("--preset", preset, "parameter preset")
        ->check(CLI::IsMember({"omega-sweep", "pi1-sweep", "omega1-sweep", "attractor"}));
    sub->callback([&inv, name] { inv.command = name; });
  }

  std::vector<std::string> rev(args.size() > 1 ? args.rbegin() : args.rend(),
                               args.size() > 1 ? args.rend() - 1 : args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report(err, kExitConfig, "usage", e.what());
  }
  if (!preset.empty()) inv.preset = preset;
  return execute(inv, out, err);
}

}  // namespace levdyn::cli
