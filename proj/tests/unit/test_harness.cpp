#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sledyson/config.hpp"
#include "sledyson/dyson_process.hpp"
#include "sledyson/io.hpp"
#include "sledyson/validation.hpp"

using namespace sledyson;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("sledyson_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

#ifdef SLEDYSON_CLI
int run_cli(const std::string& args) {
  const std::string cmd = std::string("env -u SLEDYSON_SEED ") + SLEDYSON_CLI + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
#endif

}  // namespace

TEST_CASE("config layers: defaults < file < environment < overrides") {
  RunConfig c;
  CHECK(c.get("kappa") == "2");
  CHECK(c.origin("kappa") == "default");
  c.merge_text("# comment\nkappa = 3\n\nseed=7\n", "file");
  CHECK(c.get_double("kappa") == 3.0);
  CHECK(c.get_uint("seed") == 7);
  c.merge_environment({"SLEDYSON_KAPPA=8/3", "PATH=/bin", "HOME=/root"});
  CHECK(c.get_double("kappa") == doctest::Approx(8.0 / 3.0));
  CHECK(c.get_uint("seed") == 7);
  c.set("kappa", "6");
  CHECK(c.get_double("kappa") == 6.0);
  CHECK(c.origin("kappa") == "override");
}

TEST_CASE("unknown keys are rejected at every layer") {
  RunConfig c;
  CHECK_THROWS_AS(c.merge_text("kapa = 3\n"), ConfigError);
  CHECK_THROWS_AS(c.merge_text("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(c.merge_environment({"SLEDYSON_KAPA=3"}), ConfigError);
  CHECK_THROWS_AS(c.set("bogus", "1"), ConfigError);
  CHECK_THROWS_AS(c.get("bogus"), ConfigError);
}

TEST_CASE("typed getters validate their values") {
  RunConfig c;
  c.set("kappa", "abc");
  CHECK_THROWS_AS(c.get_double("kappa"), ConfigError);
  c.set("seed", "-1");
  CHECK_THROWS_AS(c.get_uint("seed"), ConfigError);
  c.set("quick", "yes");
  CHECK(c.get_bool("quick"));
  c.set("quick", "maybe");
  CHECK_THROWS_AS(c.get_bool("quick"), ConfigError);
  c.set("kappas", " 2, 8/3 ,,6");
  CHECK(c.get_list("kappas") == std::vector<std::string>{"2", "8/3", "6"});
  CHECK_FALSE(c.get_optional_double("burn_in").has_value());
  CHECK(env_name("n_particles") == "SLEDYSON_N_PARTICLES");
}

TEST_CASE("doubles round trip through 17 significant digits") {
  for (double x : {0.1, 1.0 / 3.0, 6.283185307179586, 1e-300, -2.5e17, 5e-324})
    CHECK(parse_double(format_double(x)) == x);
}

TEST_CASE("sample batch CSV round trip is bit exact") {
  ProcessParams p;
  p.n_particles = 3;
  p.kappa = 8.0 / 3.0;
  p.chains = 4;
  p.burn_in = 1.0;
  const auto batch = sample_stationary(p, 20);
  std::stringstream ss;
  write_sample_batch(ss, batch);
  const std::string text = ss.str();
  CHECK(text.rfind("# format=sample_batch", 0) == 0);
  CHECK(text.find("t,theta_1,theta_2,theta_3\n") != std::string::npos);
  const auto back = read_sample_batch(ss);
  CHECK(back == batch);
}

TEST_CASE("trajectory CSV round trip keeps the increments") {
  ProcessParams p;
  p.n_particles = 2;
  SimulateOptions o;
  o.record_increments = true;
  const auto rec = simulate(p, 0.05, AngleConfig({0.0, 2.0}), o);
  SampleMeta m;
  m.n_particles = 2;
  m.kappa = p.kappa;
  std::stringstream ss;
  write_table(ss, to_table(rec, m));
  const auto file = trajectory_from_table(read_table(ss));
  CHECK(file.record.times == rec.times);
  CHECK(file.record.states == rec.states);
  CHECK(file.record.brownian_increments == rec.brownian_increments);
}

TEST_CASE("malformed tables are rejected") {
  std::stringstream ragged("# format=x\na,b\n1,2,3\n");
  CHECK_THROWS(read_table(ragged));
  std::stringstream wrong("# format=trajectory\nt\n0\n");
  CHECK_THROWS(batch_from_table(read_table(wrong)));
  CHECK_THROWS(parse_double("1.0x"));
}

TEST_CASE("validation report schema") {
  ValidationOptions o;
  o.only = {9};
  const auto reports = run_validation(o);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].pass());
  const auto j = nlohmann::json::parse(report_json(reports, false));
  CHECK(j["all_pass"] == true);
  for (const auto& r : j["results"]) {
    CHECK(r.contains("criterion_id"));
    CHECK(r.contains("value"));
    CHECK(r.contains("threshold"));
    CHECK(r.contains("pass"));
  }
  CHECK(report_text(reports).rfind("PASS", 0) == 0);
  CHECK_THROWS(run_criterion(11, o));
}

#ifdef SLEDYSON_CLI
TEST_CASE("CLI output is byte-identical across runs") {
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  CHECK(run_cli("simulate --n-samples 200 --chains 4 --burn-in 1 --output " + a.string()) == 0);
  CHECK(run_cli("simulate --n-samples 200 --chains 4 --burn-in 1 --output " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(fs::exists(a.string() + ".log"));
  std::ifstream in(a);
  const auto batch = read_sample_batch(in);
  CHECK(batch.rows() == 200);
  CHECK(batch.cols() == 2);
}

TEST_CASE("CLI configuration precedence") {
  const auto cfg = scratch("run.cfg");
  std::ofstream(cfg) << "kappa = 3\nn_particles = 3\nmode = trajectory\nt_end = 0.01\n";
  const auto out = scratch("traj.csv");
  CHECK(run_cli("--config " + cfg.string() + " simulate --output " + out.string()) == 0);
  std::string text = slurp(out);
  CHECK(text.find("# kappa=3\n") != std::string::npos);
  CHECK(text.find("# n_particles=3\n") != std::string::npos);
  CHECK(run_cli("--config " + cfg.string() + " simulate --kappa 6 --output " + out.string()) == 0);
  CHECK(slurp(out).find("# kappa=6\n") != std::string::npos);
  const std::string env = "SLEDYSON_KAPPA=5 ";
  CHECK(std::system(("env " + env + SLEDYSON_CLI + " --config " + cfg.string() + " simulate --output " +
                     out.string() + " 2>/dev/null").c_str()) == 0);
  CHECK(slurp(out).find("# kappa=5\n") != std::string::npos);
}

TEST_CASE("CLI rejects bad configuration with exit code 2") {
  const auto cfg = scratch("bad.cfg");
  std::ofstream(cfg) << "kapa = 3\n";
  CHECK(run_cli("--config " + cfg.string() + " exponents") == 2);
  CHECK(run_cli("simulate --kappa -1") == 2);
  CHECK(run_cli("spectrum --kappas 3") == 2);
  CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("CLI exponents, spectrum and trace") {
  const auto ex = scratch("exp.csv");
  CHECK(run_cli("exponents --output " + ex.string()) == 0);
  std::ifstream ein(ex);
  const auto et = read_table(ein);
  CHECK(et.meta("format") == "exponents");
  CHECK(et.rows.size() > 0);
  CHECK(et.column("fusion_exponent") < et.columns.size());

  const auto sp = scratch("spec.csv");
  CHECK(run_cli("spectrum --kappas 6,8 --grid 512 --output " + sp.string()) == 0);
  std::ifstream sin(sp);
  const auto st = read_table(sin);
  REQUIRE(st.rows.size() == 2);
  CHECK(st.columns == std::vector<std::string>{"kappa", "lambda_numeric", "lambda_exact", "abs_error"});
  CHECK(parse_double(st.rows[0][3]) < 1e-4);

  const auto tr = scratch("trace.csv");
  CHECK(run_cli("trace --n-particles 2 --kappa 3 --t-end 1 --trace-samples 20 --output " + tr.string()) == 0);
  std::ifstream tin(tr);
  const auto tt = read_table(tin);
  for (const auto& row : tt.rows) {
    if (row[tt.column("resolved")] != "1") continue;
    const double re = parse_double(row[tt.column("re")]);
    const double im = parse_double(row[tt.column("im")]);
    CHECK(re * re + im * im <= 1.0 + 1e-12);
  }
}

TEST_CASE("CLI validate exits 0 on passing criteria and writes JSON") {
  const auto out = scratch("report.json");
  CHECK(run_cli("validate --criteria 7,9 --format JSON --output " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["all_pass"] == true);
}
#endif
