#include "levdyn/logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace levdyn::log {

namespace {

spdlog::logger& logger() {
  static auto instance = [] {
    auto l = spdlog::stderr_logger_mt("levdyn");
    l->set_pattern("levdyn [%l] %v");
    switch (level_from_env()) {
      case Level::error: l->set_level(spdlog::level::err); break;
      case Level::info: l->set_level(spdlog::level::info); break;
      case Level::debug: l->set_level(spdlog::level::debug); break;
    }
    return l;
  }();
  return *instance;
}

}  // namespace

Level level_from_env() {
  const char* env = std::getenv("LEVDYN_LOG");
  if (env == nullptr) return Level::info;
  const std::string v(env);
  if (v == "error") return Level::error;
  if (v == "debug") return Level::debug;
  return Level::info;
}

void set_level(Level level) {
  switch (level) {
    case Level::error: logger().set_level(spdlog::level::err); break;
    case Level::info: logger().set_level(spdlog::level::info); break;
    case Level::debug: logger().set_level(spdlog::level::debug); break;
  }
}

void error(std::string_view message) { logger().error("{}", message); }
void warn(std::string_view message) { logger().warn("{}", message); }
void info(std::string_view message) { logger().info("{}", message); }
void debug(std::string_view message) { logger().debug("{}", message); }

}  // namespace levdyn::log
