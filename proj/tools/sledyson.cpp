// sledyson: command-line front end.
//
//   sledyson [--config FILE] [--set key=value]... <command> [--key value]...
//
// Commands: simulate, validate, spectrum, exponents, trace. Every key of the
// flat configuration namespace is also a flag (`--n-particles 3`). Exit
// status: 0 success, 1 a check failed, 2 bad configuration, 3 runtime error.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "sledyson/circular_ensemble.hpp"
#include "sledyson/config.hpp"
#include "sledyson/dyson_process.hpp"
#include "sledyson/exponents.hpp"
#include "sledyson/io.hpp"
#include "sledyson/loewner.hpp"
#include "sledyson/spectral.hpp"
#include "sledyson/validation.hpp"
#include "sledyson/version.hpp"

namespace {

using namespace sledyson;

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

ProcessParams process_params(const RunConfig& c) {
  ProcessParams p;
  p.n_particles = c.get_size("n_particles");
  p.kappa = c.get_double("kappa");
  p.dt = c.get_double("dt");
  p.seed = c.get_uint("seed");
  p.burn_in = c.get_optional_double("burn_in");
  p.thinning = c.get_double("thinning");
  p.chains = c.get_size("chains");
  p.threads = c.get_size("threads");
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return p;
}

std::string table_text(const Table& t) {
  std::ostringstream os;
  write_table(os, t);
  return os.str();
}

// Timestamps live only here, so the main output stays a function of the config.
void write_sidecar(const RunConfig& c, const std::string& command, double seconds) {
  const std::string& out = c.get("output");
  if (out == "-") return;
  std::ofstream log(out + ".log");
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  log << "command = " << command << "\nfinished = " << buf << "\nseconds = " << seconds
      << "\nversion = " << kVersion << "\n" << c.dump();
}

void require_csv(const RunConfig& c, const std::string& command) {
  if (c.get("format") != "CSV") throw ConfigError(command + " writes CSV only");
}

int cmd_simulate(const RunConfig& c) {
  require_csv(c, "simulate");
  const ProcessParams p = process_params(c);
  const std::string mode = c.get("mode");
  const SampleSource source = sample_source_from_string(c.get("source"));
  if (mode == "stationary") {
    const std::size_t n = c.get_size("n_samples");
    if (n == 0) throw ConfigError("n_samples must be positive");
    const SampleBatch batch = source == SampleSource::DysonSde
                                  ? sample_stationary(p, n)
                                  : sample_matrix_ensemble(source, p.n_particles, n, p.seed);
    write_output(c.get("output"), table_text(to_table(batch)));
    return 0;
  }
  if (mode == "trajectory") {
    if (source != SampleSource::DysonSde) throw ConfigError("trajectories need source = DYSON_SDE");
    const double t_end = c.get_double("t_end");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    SimulateOptions so;
    so.record_interval = c.get_optional_double("record_interval");
    so.record_increments = true;
    const TrajectoryRecord rec = simulate(p, t_end, AngleConfig::equally_spaced(p.n_particles), so);
    SampleMeta meta;
    meta.created_by = SampleSource::DysonSde;
    meta.n_particles = p.n_particles;
    meta.kappa = p.kappa;
    meta.beta = p.beta();
    meta.seed = p.seed;
    meta.dt = p.dt;
    write_output(c.get("output"), table_text(to_table(rec, meta)));
    return 0;
  }
  throw ConfigError("mode must be stationary or trajectory, got '" + mode + "'");
}

int cmd_validate(const RunConfig& c) {
  ValidationOptions o;
  o.quick = c.get_bool("quick");
  o.seed = c.get_uint("seed");
  o.threads = c.get_size("threads");
  for (const std::string& s : c.get_list("criteria")) {
    const int k = std::stoi(s);
    if (k < 1 || k > kCriterionCount) throw ConfigError("no criterion " + s);
    o.only.push_back(k);
  }
  const auto reports = run_validation(o);
  std::cerr << report_text(reports);
  write_output(c.get("output"), report_json(reports, o.quick));
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass(); });
  return ok ? 0 : kExitCheckFailed;
}

std::vector<std::string> kappa_list(const RunConfig& c, std::vector<std::string> fallback) {
  auto v = c.get_list("kappas");
  return v.empty() ? fallback : v;
}

int cmd_spectrum(const RunConfig& c) {
  require_csv(c, "spectrum");
  const std::size_t m = c.get_size("grid");
  const TimeConvention conv = time_convention_from_string(c.get("time_convention"));
  Table t;
  t.metadata = {{"format", "spectrum"}, {"version", kVersion}, {"grid", std::to_string(m)},
                {"time_convention", to_string(conv)}, {"operator", "adjoint generator, vanishing branch"}};
  t.columns = {"kappa", "lambda_numeric", "lambda_exact", "abs_error"};
  for (const std::string& ks : kappa_list(c, {"4.5", "5", "6", "7", "8"})) {
    RunConfig one;
    one.set("kappa", ks);
    const double kappa = one.get_double("kappa");
    if (kappa <= 4.0) throw ConfigError("spectrum needs kappa > 4 (got " + ks + ")");
    const double num = lowest_eigenpair(build_adjoint_n2(kappa, m, conv)).value;
    const double exact = one_arm_lambda_exact(kappa, conv);
    t.rows.push_back({format_double(kappa), format_double(num), format_double(exact),
                      format_double(std::abs(num - exact))});
  }
  write_output(c.get("output"), table_text(t));
  return 0;
}

int cmd_exponents(const RunConfig& c) {
  require_csv(c, "exponents");
  const BetaConvention conv = beta_convention_from_string(c.get("beta_convention"));
  const std::int64_t p_max = c.get_int("p_max");
  if (p_max < 2) throw ConfigError("p_max must be at least 2");
  Table t;
  t.metadata = {{"format", "exponents"}, {"version", kVersion}, {"beta_convention", to_string(conv)}};
  t.columns = {"kappa", "beta", "p", "h_1_p1", "fusion_exponent", "ansatz_exponent", "h21",
               "one_arm_lambda"};
  bool ok = true;
  for (const std::string& ks : kappa_list(c, {"2", "8/3", "3", "4", "6"})) {
    const Rational kappa = Rational::parse(ks);
    const Rational beta = beta_from_kappa(kappa, conv);
    for (std::int64_t p = 2; p <= p_max; ++p) {
      const Rational f = fusion_exponent(p, kappa);
      ok = ok && f == kac_h_1_s(kappa, p) - Rational(p) * kac_h_1_s(kappa, 1);
      ok = ok && ansatz_exponent(p, beta_from_kappa(kappa)) == Rational(2) * f;
      t.rows.push_back({kappa.str(), beta.str(), std::to_string(p), kac_h_1_s(kappa, p).str(), f.str(),
                        ansatz_exponent(p, beta).str(), h21(kappa).str(), one_arm_lambda(kappa).str()});
    }
  }
  write_output(c.get("output"), table_text(t));
  return ok ? 0 : kExitCheckFailed;
}

int cmd_trace(const RunConfig& c) {
  require_csv(c, "trace");
  const ProcessParams p = process_params(c);
  const double t_end = c.get_double("t_end");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  const std::size_t samples = c.get_size("trace_samples");
  if (samples == 0) throw ConfigError("trace_samples must be positive");
  SimulateOptions so;
  so.record_interval = p.dt;
  const TrajectoryRecord rec = simulate(p, t_end, AngleConfig::equally_spaced(p.n_particles), so);
  const DriveHistory drive = DriveHistory::from_trajectory(rec, p.kappa, c.get_double("dt_max"));
  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    times[i] = t_end * static_cast<double>(i + 1) / static_cast<double>(samples);
  }
  Table t;
  t.metadata = {{"format", "trace"}, {"version", kVersion}, {"n_particles", std::to_string(p.n_particles)},
                {"kappa", format_double(p.kappa)}, {"seed", std::to_string(p.seed)},
                {"dt", format_double(p.dt)}, {"t_end", format_double(t_end)}};
  t.columns = {"curve", "t", "re", "im", "resolved"};
  bool in_disk = true;
  std::size_t unresolved = 0;
  for (std::size_t j = 0; j < p.n_particles; ++j) {
    for (const TracePoint& tp : trace_points(drive, j, times)) {
      if (tp.resolved) {
        in_disk = in_disk && std::abs(tp.z) <= 1.0;
      } else {
        ++unresolved;
      }
      t.rows.push_back({std::to_string(j + 1), format_double(tp.t), format_double(tp.z.real()),
                        format_double(tp.z.imag()), tp.resolved ? "1" : "0"});
    }
  }
  t.metadata.emplace_back("unresolved", std::to_string(unresolved));
  write_output(c.get("output"), table_text(t));
  return in_disk ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple radial SLE and circular Dyson Brownian motion"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::vector<std::string> sets;
  app.add_option("--config", config_file, "flat key=value config file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override key=value (repeatable)");
  std::map<std::string, std::string> flags;
  for (const ConfigKey& k : config_keys()) {
    if (k.name == "quick") {
      app.add_flag_callback(flag_name(k.name), [&flags] { flags["quick"] = "true"; }, k.description);
      continue;
    }
    app.add_option_function<std::string>(flag_name(k.name), [&flags, name = k.name](const std::string& v) {
      flags[name] = v;
    }, k.description);
  }

  const std::map<std::string, int (*)(const RunConfig&)> commands = {
      {"simulate", cmd_simulate}, {"validate", cmd_validate}, {"spectrum", cmd_spectrum},
      {"exponents", cmd_exponents}, {"trace", cmd_trace}};
  const std::map<std::string, std::string> help = {
      {"simulate", "stationary samples or a trajectory of the Dyson process (CSV)"},
      {"validate", "run the acceptance suite, JSON report"},
      {"spectrum", "one-arm eigenvalue sweep (CSV)"},
      {"exponents", "exact exponent tables (CSV)"},
      {"trace", "SLE trace points from a simulated drive (CSV)"}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  std::string command;
  for (const auto* sub : app.get_subcommands()) command = sub->get_name();

  RunConfig config;
  try {
    if (!config_file.empty()) config.merge_file(config_file);
    config.merge_environment();
    for (const auto& [k, v] : flags) config.set(k, v, "flag " + flag_name(k));
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      config.set(s.substr(0, eq), s.substr(eq + 1), "--set");
    }
    const std::string fmt = config.get("format");
    if (fmt != "CSV" && fmt != "JSON") throw ConfigError("format must be CSV or JSON");
  } catch (const ConfigError& e) {
    std::cerr << "sledyson: " << e.what() << "\n";
    return kExitConfig;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const int rc = commands.at(command)(config);
    write_sidecar(config, command,
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "sledyson: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "sledyson: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sledyson: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "sledyson: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
