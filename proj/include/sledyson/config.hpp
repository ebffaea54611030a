#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Flat key=value run configuration. Precedence, lowest first: built-in
// defaults, config file, SLEDYSON_<KEY> environment variables, explicit
// overrides (command-line flags). Unknown keys are rejected at every layer.

namespace sledyson {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigKey {
  std::string name;
  std::string default_value;  // empty: unset
  std::string description;
};

/// The documented key namespace.
const std::vector<ConfigKey>& config_keys();

class RunConfig {
 public:
  /// Defaults only.
  RunConfig();

  /// Lines are `key = value`; '#' starts a comment; blank lines ignored.
  void merge_text(const std::string& text, const std::string& origin = "config");
  void merge_file(const std::string& path);
  /// Reads SLEDYSON_<KEY> for every known key from the process environment;
  /// any other SLEDYSON_ variable is an error.
  void merge_environment();
  /// Same as `env` but from an explicit list of NAME=VALUE strings.
  void merge_environment(const std::vector<std::string>& env);
  void set(const std::string& key, const std::string& value, const std::string& origin = "override");

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string origin(const std::string& key) const;

  double get_double(const std::string& key) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Comma-separated list; entries trimmed, empties dropped.
  std::vector<std::string> get_list(const std::string& key) const;

  /// `key = value` lines for every key with a value, in key order.
  std::string dump() const;

 private:
  static void require_known(const std::string& key, const std::string& origin);
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origins_;
};

/// Environment variable name for a key: SLEDYSON_ + upper case.
std::string env_name(const std::string& key);

}  // namespace sledyson
