#pragma once

#include <ostream>
#include <string>

#include "levdyn_cli/app.hpp"
#include "levdyn_cli/config.hpp"

namespace levdyn::cli {

struct Context {
  const Config& config;
  const Invocation& inv;
  std::ostream& out;
  std::ostream& err;
};

int cmd_simulate(const Context& ctx);
int cmd_bifurcate(const Context& ctx);
int cmd_lyapunov(const Context& ctx);
int cmd_attractor(const Context& ctx);
int cmd_boxdim(const Context& ctx);
int cmd_fixedpoint(const Context& ctx);
int cmd_micro(const Context& ctx);
int cmd_stability_map(const Context& ctx);

}  // namespace levdyn::cli
