#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace levdyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConstraint = 3;

struct Invocation {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_path;
  std::size_t workers = 1;
  std::optional<std::string> preset;
};

std::vector<std::string> command_names();

/// Runs one subcommand. Output goes to the --out file, or `out` when unset.
int execute(const Invocation& inv, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and executes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace levdyn::cli
