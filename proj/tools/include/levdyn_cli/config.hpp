#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "levdyn/model.hpp"

namespace levdyn::cli {

using Json = nlohmann::json;

/// Bad configuration text or values. `key` is a dotted path when known,
/// `line` the 1-based line of a syntax error.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::optional<std::size_t> line, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::string key_;
  std::optional<std::size_t> line_;
};

/// Every accepted key with its default. Null defaults mean "unset".
Json default_config();

/// Patch applied between the defaults and the user document.
Json preset_patch(std::string_view name);
std::vector<std::string> preset_names();

/// Merged configuration with typed accessors keyed by dotted path.
class Config {
 public:
  explicit Config(Json doc);

  const Json& doc() const { return doc_; }
  /// FNV-1a 64 of the canonical (sorted-key) dump.
  const std::string& hash() const { return hash_; }

  bool is_set(std::string_view path) const;
  double number(std::string_view path) const;
  std::size_t count(std::string_view path) const;
  std::uint64_t seed(std::string_view path) const;
  bool flag(std::string_view path) const;
  std::string text(std::string_view path) const;
  std::vector<double> numbers(std::string_view path) const;

  std::optional<std::uint64_t> run_seed() const;
  /// Throws ConfigError naming run.seed when absent.
  std::uint64_t require_seed(std::string_view command) const;

  /// model block validated; model key errors name the offending key.
  ModelParams model() const;
  MarketParams market() const;

 private:
  const Json& at(std::string_view path) const;

  Json doc_;
  std::string hash_;
};

/// Parses `text`, rejects unknown keys and type mismatches, then layers
/// defaults <- preset <- user.
Config load_config(std::string_view text, const std::optional<std::string>& preset = {});
Config load_config_file(const std::string& path, const std::optional<std::string>& preset = {});

std::string fnv1a_hex(std::string_view bytes);

}  // namespace levdyn::cli
