#pragma once

#include <string_view>

namespace levdyn::log {

enum class Level { error, info, debug };

/// Reads LEVDYN_LOG (error|info|debug); unset or unknown maps to info.
Level level_from_env();
void set_level(Level level);

void error(std::string_view message);
void warn(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

}  // namespace levdyn::log
