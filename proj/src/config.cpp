#include "sledyson/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

extern char** environ;

namespace sledyson {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const ConfigKey* find_key(const std::string& name) {
  for (const ConfigKey& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

constexpr const char* kEnvPrefix = "SLEDYSON_";

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"seed", "1", "master seed; every output is a function of the config and this seed"},
      {"n_particles", "2", "number of particles N"},
      {"kappa", "2", "SLE parameter kappa > 0"},
      {"dt", "0.001", "Euler-Maruyama step"},
      {"burn_in", "", "discarded relaxation time; default 10 + 2 ln N"},
      {"thinning", "1", "process time between retained stationary samples"},
      {"chains", "64", "independent chains for stationary sampling"},
      {"threads", "0", "worker threads (0 = hardware); output does not depend on it"},
      {"mode", "stationary", "simulate: stationary | trajectory"},
      {"source", "DYSON_SDE", "simulate: DYSON_SDE | COE | CUE | CSE"},
      {"n_samples", "1000", "simulate: stationary or matrix-ensemble draws"},
      {"t_end", "1", "simulate/trace: trajectory length"},
      {"record_interval", "", "simulate: spacing of recorded states; default dt"},
      {"kappas", "", "spectrum/exponents: comma-separated kappa list (fractions allowed)"},
      {"grid", "4096", "spectrum: number of grid intervals M"},
      {"time_convention", "LSW_HALF", "spectrum: LSW_HALF | DYSON"},
      {"beta_convention", "DYSON_4_OVER_KAPPA",
       "exponents: DYSON_4_OVER_KAPPA | CFT_2_OVER_KAPPA | ERRATUM_8_OVER_KAPPA"},
      {"p_max", "10", "exponents: largest leg number p"},
      {"trace_samples", "200", "trace: points per curve"},
      {"dt_max", "0.001", "trace: largest flow step"},
      {"quick", "false", "validate: reduced sample counts and relaxed thresholds"},
      {"criteria", "", "validate: comma-separated criterion numbers (default all)"},
      {"output", "-", "output path; '-' writes to stdout"},
      {"format", "CSV", "CSV | JSON"},
  };
  return keys;
}

std::string env_name(const std::string& key) {
  std::string out = kEnvPrefix;
  for (char c : key) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

RunConfig::RunConfig() {
  for (const ConfigKey& k : config_keys()) {
    if (!k.default_value.empty()) {
      values_[k.name] = k.default_value;
      origins_[k.name] = "default";
    }
  }
}

void RunConfig::require_known(const std::string& key, const std::string& origin) {
  if (!find_key(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
}

void RunConfig::set(const std::string& key, const std::string& value, const std::string& origin) {
  require_known(key, origin);
  if (value.empty()) {
    values_.erase(key);
  } else {
    values_[key] = value;
  }
  origins_[key] = origin;
}

void RunConfig::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path);
}

void RunConfig::merge_environment(const std::vector<std::string>& env) {
  const std::string prefix = kEnvPrefix;
  for (const std::string& entry : env) {
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(0, eq);
    std::string key = name.substr(prefix.size());
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!find_key(key)) throw ConfigError("environment: unknown variable " + name);
    set(key, trim(entry.substr(eq + 1)), "env " + name);
  }
}

void RunConfig::merge_environment() {
  std::vector<std::string> env;
  for (char** e = environ; e && *e; ++e) env.emplace_back(*e);
  merge_environment(env);
}

bool RunConfig::has(const std::string& key) const {
  require_known(key, "lookup");
  return values_.count(key) > 0;
}

const std::string& RunConfig::get(const std::string& key) const {
  require_known(key, "lookup");
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("key '" + key + "' has no value");
  return it->second;
}

std::string RunConfig::origin(const std::string& key) const {
  const auto it = origins_.find(key);
  return it == origins_.end() ? "unset" : it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& s = get(key);
  // Fractions such as 8/3 are accepted so kappa lists can be written exactly.
  const auto slash = s.find('/');
  try {
    std::size_t pos = 0;
    if (slash != std::string::npos) {
      const double a = std::stod(s.substr(0, slash), &pos);
      if (pos != slash) throw std::invalid_argument("");
      const std::string rest = s.substr(slash + 1);
      const double b = std::stod(rest, &pos);
      if (pos != rest.size() || b == 0.0) throw std::invalid_argument("");
      return a / b;
    }
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + s + "' (from " + origin(key) + ")");
  }
}

std::optional<double> RunConfig::get_optional_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  const std::string& s = get(key);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(key + ": not an integer: '" + s + "' (from " + origin(key) + ")");
  }
  return v;
}

std::uint64_t RunConfig::get_uint(const std::string& key) const {
  const std::string& s = get(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(key + ": not a nonnegative integer: '" + s + "' (from " + origin(key) + ")");
  }
  return v;
}

std::size_t RunConfig::get_size(const std::string& key) const {
  return static_cast<std::size_t>(get_uint(key));
}

bool RunConfig::get_bool(const std::string& key) const {
  std::string s = get(key);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": not a boolean: '" + s + "'");
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  if (!has(key)) return out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace sledyson
