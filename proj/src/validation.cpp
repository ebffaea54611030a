#include "sledyson/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sledyson/circular_ensemble.hpp"
#include "sledyson/dyson_process.hpp"
#include "sledyson/exponents.hpp"
#include "sledyson/loewner.hpp"
#include "sledyson/rng.hpp"
#include "sledyson/spectral.hpp"

namespace sledyson {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

CheckResult below(std::string id, double value, double threshold, std::string what) {
  return {std::move(id), value, threshold, value < threshold, what + " < " + fmt(threshold)};
}

CheckResult at_least(std::string id, double value, double threshold, std::string what) {
  return {std::move(id), value, threshold, value >= threshold, what + " >= " + fmt(threshold)};
}

/// value = measured order, threshold = allowed deviation from `target`.
CheckResult order_near(std::string id, double order, double target, double tol, std::string what) {
  return {std::move(id), order, tol, std::abs(order - target) <= tol,
          "|" + what + " - " + fmt(target) + "| <= " + fmt(tol)};
}

std::string kappa_label(const std::string& k) {
  std::string s = k;
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

CriterionReport stationary_law(const ValidationOptions& o) {
  CriterionReport r{1, "stationary gap law, N=2", {}, 0.0};
  const std::size_t n = o.quick ? 20000 : 100000;
  const double threshold = o.quick ? 0.02 : 0.01;
  const std::vector<std::pair<std::string, double>> kappas = {
      {"2", 2.0}, {"3", 3.0}, {"4", 4.0}, {"8/3", 8.0 / 3.0}};
  std::uint64_t k = 0;
  for (const auto& [label, kappa] : kappas) {
    ProcessParams p;
    p.n_particles = 2;
    p.kappa = kappa;
    p.seed = derive_seed(o.seed, 1, k++);
    p.threads = o.threads;
    const SampleBatch batch = sample_stationary(p, n);
    const GapCdf cdf(4.0 / kappa);
    const double d = ks_statistic(single_gap_per_row(batch, p.seed + 1), cdf);
    r.checks.push_back(below("C1.kappa_" + kappa_label(label), d, threshold, "KS distance"));
  }
  return r;
}

CriterionReport classical_ensembles(const ValidationOptions& o) {
  CriterionReport r{2, "Dyson SDE vs COE/CUE/CSE gaps", {}, 0.0};
  const std::size_t n = o.quick ? 2000 : 10000;
  const std::vector<std::tuple<double, SampleSource, std::string>> cases = {
      {4.0, SampleSource::Coe, "COE"}, {2.0, SampleSource::Cue, "CUE"}, {1.0, SampleSource::Cse, "CSE"}};
  std::uint64_t k = 0;
  for (std::size_t np : {std::size_t{2}, std::size_t{3}}) {
    for (const auto& [kappa, source, name] : cases) {
      ProcessParams p;
      p.n_particles = np;
      p.kappa = kappa;
      p.seed = derive_seed(o.seed, 2, k);
      p.threads = o.threads;
      const SampleBatch sde = sample_stationary(p, n);
      const SampleBatch mat = sample_matrix_ensemble(source, np, n, derive_seed(o.seed, 3, k));
      ++k;
      const double d = ks_two_sample(single_gap_per_row(sde, p.seed + 1),
                                     single_gap_per_row(mat, p.seed + 2));
      r.checks.push_back(below("C2.N" + std::to_string(np) + "." + name, d,
                               ks_threshold_two_sample(n, n), "two-sample KS distance"));
    }
  }
  return r;
}

std::vector<std::size_t> spectral_grids(bool quick) {
  return quick ? std::vector<std::size_t>{512, 1024, 2048} : std::vector<std::size_t>{1024, 2048, 4096};
}

CriterionReport one_arm_eigenvalue(const ValidationOptions& o) {
  CriterionReport r{3, "one-arm eigenvalue", {}, 0.0};
  const double tol = o.quick ? 3e-3 : 1e-3;
  for (int kappa : {6, 8}) {
    const double exact = one_arm_lambda_exact(kappa, TimeConvention::LswHalf);
    std::vector<double> hs, errs;
    double last = 0.0;
    for (std::size_t m : spectral_grids(o.quick)) {
      last = lowest_eigenpair(build_adjoint_n2(kappa, m, TimeConvention::LswHalf)).value;
      hs.push_back(kTwoPi / static_cast<double>(m));
      errs.push_back(std::abs(last - exact));
    }
    const std::string id = "C3.kappa_" + std::to_string(kappa);
    r.checks.push_back(below(id + ".error", std::abs(last - exact), tol, "|lambda - exact|"));
    r.checks.push_back(order_near(id + ".order", loglog_slope(hs, errs), 2.0, 0.3, "order"));
  }
  return r;
}

CriterionReport eigenfunction(const ValidationOptions& o) {
  CriterionReport r{4, "one-arm eigenfunction", {}, 0.0};
  const std::size_t m = spectral_grids(o.quick).back();
  const GridOperator op = build_adjoint_n2(6.0, m, TimeConvention::LswHalf);
  const Eigenpair e = lowest_eigenpair(op);
  std::vector<double> ref(op.size());
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = std::pow(std::sin(op.grid.node(i) / 4.0), 1.0 / 3.0);
  r.checks.push_back(at_least("C4.kappa_6.overlap", overlap(op.grid, e.function, ref), 0.999,
                              "normalized overlap"));
  return r;
}

CriterionReport stationarity(const ValidationOptions& o) {
  CriterionReport r{5, "Fokker-Planck stationarity residual", {}, 0.0};
  const std::vector<std::size_t> ms = o.quick ? std::vector<std::size_t>{128, 256, 512}
                                              : std::vector<std::size_t>{256, 512, 1024, 2048};
  for (int kappa : {2, 4, 6}) {
    std::vector<double> hs, res;
    for (std::size_t m : ms) {
      hs.push_back(kTwoPi / static_cast<double>(m));
      res.push_back(stationarity_residual(kappa, m, kPi / 4.0, 7.0 * kPi / 4.0));
    }
    r.checks.push_back(order_near("C5.kappa_" + std::to_string(kappa) + ".order", loglog_slope(hs, res),
                                  2.0, 0.3, "residual order"));
  }
  return r;
}

CriterionReport ground_state(const ValidationOptions& o) {
  CriterionReport r{6, "Calogero-Sutherland ground state", {}, 0.0};
  const std::size_t m = spectral_grids(o.quick).back();
  for (int kappa : {2, 3, 6}) {
    const GridOperator h = build_cs_hamiltonian_n2(kappa, m);
    const Eigenpair e = lowest_eigenpair(h);
    std::vector<double> ref = equilibrium_density_n2(kappa, h.grid);
    for (double& v : ref) v = std::sqrt(v);
    const std::string id = "C6.kappa_" + std::to_string(kappa);
    r.checks.push_back(below(id + ".ground_eigenvalue", std::abs(e.value), 1e-3, "|lambda_0|"));
    r.checks.push_back(at_least(id + ".overlap", overlap(h.grid, e.function, ref), 0.999,
                                "overlap with sqrt(P_eq)"));
  }
  return r;
}

CriterionReport derivative_origin(const ValidationOptions& o) {
  CriterionReport r{7, "conformal radius G_t'(0) = e^{Nt}", {}, 0.0};
  for (std::size_t n = 1; n <= 3; ++n) {
    ProcessParams p;
    p.n_particles = n;
    p.kappa = 2.0;
    p.seed = derive_seed(o.seed, 7, n);
    SimulateOptions so;
    so.record_interval = 1e-3;
    const TrajectoryRecord rec = simulate(p, 0.5, AngleConfig::equally_spaced(n, 0.1), so);
    const DriveHistory drive = DriveHistory::from_trajectory(rec, p.kappa, 1e-3);
    double worst = 0.0;
    for (double t : {0.1, 0.2, 0.3, 0.4, 0.5}) {
      const double exact = std::exp(static_cast<double>(n) * t);
      worst = std::max(worst, std::abs(derivative_at_origin(drive, t) - exact) / exact);
    }
    r.checks.push_back(below("C7.N" + std::to_string(n), worst, 1e-3, "max relative error"));
  }
  return r;
}

CriterionReport composition(const ValidationOptions& o) {
  CriterionReport r{8, "joint step vs composed single-SLE steps", {}, 0.0};
  const AngleConfig cfg({0.4, 3.1});
  NormalStream rng(derive_seed(o.seed, 8));
  const std::vector<double> noise = {rng(), rng()};
  const std::vector<Complex> probes = {{0.2, 0.0}, {0.0, 0.5}, {-0.3, -0.3}, {0.5, -0.4}, {-0.6, 0.2}};
  const std::vector<double> dts = {1e-2, 1e-3, 1e-4};
  const CompositionScaling s = composition_scaling(cfg, 3.0, dts, probes, noise);
  r.checks.push_back(order_near("C8.N2.kappa_3.slope", s.slope, 2.0, 0.2, "log-log slope"));
  return r;
}

CriterionReport exponent_identities(const ValidationOptions&) {
  CriterionReport r{9, "exact exponent identities", {}, 0.0};
  std::vector<Rational> kappas;
  for (const char* s : {"1/2", "1", "4/3", "3/2", "2", "12/5", "8/3", "3", "10/3", "7/2", "4", "9/2",
                        "5", "16/3", "11/2", "6", "13/2", "7", "15/2", "8"}) {
    kappas.push_back(Rational::parse(s));
  }
  int fusion_bad = 0, ansatz_bad = 0;
  for (const Rational& k : kappas) {
    for (std::int64_t p = 2; p <= 10; ++p) {
      const Rational f = fusion_exponent(p, k);
      if (f != kac_h_1_s(k, p) - Rational(p) * kac_h_1_s(k, 1)) ++fusion_bad;
      if (ansatz_exponent(p, beta_from_kappa(k)) != Rational(2) * f) ++ansatz_bad;
    }
  }
  r.checks.push_back({"C9.fusion_vs_kac", static_cast<double>(fusion_bad), 0.0, fusion_bad == 0,
                      "mismatches == 0 over p=2..10, 20 kappas"});
  r.checks.push_back({"C9.ansatz_vs_fusion", static_cast<double>(ansatz_bad), 0.0, ansatz_bad == 0,
                      "mismatches == 0 over p=2..10, 20 kappas"});
  return r;
}

CriterionReport gradient(const ValidationOptions& o) {
  CriterionReport r{10, "drift = -grad V", {}, 0.0};
  std::mt19937_64 rng(derive_seed(o.seed, 10));
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const double h = 1e-6;
  double worst = 0.0;
  int tested = 0;
  while (tested < 100) {
    const std::size_t n = 2 + static_cast<std::size_t>(tested % 5);
    std::vector<double> th(n);
    for (double& v : th) v = u(rng);
    const AngleConfig cfg = AngleConfig::wrapped(th);
    // Central differences lose accuracy next to a collision.
    if (cfg.min_gap() < 0.05) continue;
    const std::vector<double> b = drift(cfg);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> plus = th, minus = th;
      plus[j] += h;
      minus[j] -= h;
      const double g = (potential(AngleConfig::wrapped(plus)) - potential(AngleConfig::wrapped(minus))) / (2 * h);
      worst = std::max(worst, std::abs(b[j] + g));
    }
    ++tested;
  }
  r.checks.push_back(below("C10.max_abs_difference", worst, 1e-5, "max |drift + dV/dtheta|"));
  return r;
}

}  // namespace

bool CriterionReport::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& CriterionReport::worst() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return c;
  }
  return *std::max_element(checks.begin(), checks.end(), [](const CheckResult& a, const CheckResult& b) {
    auto margin = [](const CheckResult& c) {
      return c.threshold != 0.0 ? std::abs(c.value) / std::abs(c.threshold) : 0.0;
    };
    return margin(a) < margin(b);
  });
}

CriterionReport run_criterion(int number, const ValidationOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CriterionReport r;
  switch (number) {
    case 1: r = stationary_law(options); break;
    case 2: r = classical_ensembles(options); break;
    case 3: r = one_arm_eigenvalue(options); break;
    case 4: r = eigenfunction(options); break;
    case 5: r = stationarity(options); break;
    case 6: r = ground_state(options); break;
    case 7: r = derivative_origin(options); break;
    case 8: r = composition(options); break;
    case 9: r = exponent_identities(options); break;
    case 10: r = gradient(options); break;
    default: throw std::invalid_argument("no criterion " + std::to_string(number));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionReport> run_validation(const ValidationOptions& options) {
  std::vector<int> which = options.only;
  if (which.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) which.push_back(i);
  }
  std::vector<CriterionReport> out;
  for (int k : which) {
    try {
      out.push_back(run_criterion(k, options));
    } catch (const std::exception& e) {
      CriterionReport r{k, "criterion " + std::to_string(k), {}, 0.0};
      r.checks.push_back({"C" + std::to_string(k) + ".error", 0.0, 0.0, false, e.what()});
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::string report_json(const std::vector<CriterionReport>& reports, bool quick) {
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  bool all = true;
  for (const CriterionReport& r : reports) {
    all = all && r.pass();
    for (const CheckResult& c : r.checks) {
      nlohmann::ordered_json j;
      j["criterion_id"] = c.criterion_id;
      j["value"] = c.value;
      j["threshold"] = c.threshold;
      j["pass"] = c.pass;
      j["detail"] = c.detail;
      results.push_back(std::move(j));
    }
  }
  nlohmann::ordered_json doc;
  doc["quick"] = quick;
  doc["all_pass"] = all && !reports.empty();
  doc["results"] = std::move(results);
  return doc.dump(2) + "\n";
}

std::string report_text(const std::vector<CriterionReport>& reports) {
  std::ostringstream os;
  for (const CriterionReport& r : reports) {
    const CheckResult& w = r.worst();
    os << (r.pass() ? "PASS" : "FAIL") << "  criterion " << r.number << ": " << r.title << "  ["
       << w.criterion_id << " = " << fmt(w.value) << ", " << w.detail << "; " << r.checks.size()
       << " checks, " << fmt(r.seconds) << " s]\n";
  }
  return os.str();
}

}  // namespace sledyson
