#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sledyson/circular_ensemble.hpp"
#include "sledyson/dyson_process.hpp"
#include "sledyson/exponents.hpp"
#include "sledyson/loewner.hpp"
#include "sledyson/spectral.hpp"
#include "sledyson/validation.hpp"
#include "sledyson/version.hpp"

namespace py = pybind11;
using namespace sledyson;

namespace {

py::array_t<double> batch_array(const SampleBatch& b) {
  py::array_t<double> out({b.rows(), b.cols()});
  std::memcpy(out.mutable_data(), b.data().data(), b.data().size() * sizeof(double));
  return out;
}

ProcessParams make_params(std::size_t n, double kappa, double dt, std::uint64_t seed) {
  ProcessParams p;
  p.n_particles = n;
  p.kappa = kappa;
  p.dt = dt;
  p.seed = seed;
  p.validate();
  return p;
}

std::pair<std::int64_t, std::int64_t> pair(const Rational& r) { return {r.num(), r.den()}; }

Rational kappa_of(const std::string& s) { return Rational::parse(s); }

}  // namespace

PYBIND11_MODULE(_sledyson, m) {
  m.doc() = "Circular Dyson process, multiple radial SLE and their spectral theory";
  m.attr("__version__") = kVersion;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<IntegratorError>(m, "IntegratorError", PyExc_RuntimeError);

  m.def("drift", [](const std::vector<double>& a) { return drift(AngleConfig(a)); }, py::arg("angles"));
  m.def("potential", [](const std::vector<double>& a) { return potential(AngleConfig(a)); },
        py::arg("angles"));

  m.def(
      "simulate",
      [](std::vector<double> initial, double kappa, double t_end, double dt, std::uint64_t seed,
         std::optional<double> record_interval) {
        const auto p = make_params(initial.size(), kappa, dt, seed);
        SimulateOptions o;
        o.record_interval = record_interval;
        TrajectoryRecord rec;
        {
          py::gil_scoped_release release;
          rec = simulate(p, t_end, AngleConfig(std::move(initial)), o);
        }
        py::array_t<double> states({rec.states.size(), p.n_particles});
        auto s = states.mutable_unchecked<2>();
        for (std::size_t k = 0; k < rec.states.size(); ++k)
          for (std::size_t j = 0; j < p.n_particles; ++j) s(k, j) = rec.states[k][j];
        py::array_t<double> times(std::vector<py::ssize_t>{static_cast<py::ssize_t>(rec.times.size())},
                                  rec.times.data());
        return py::make_tuple(times, states);
      },
      py::arg("initial"), py::arg("kappa"), py::arg("t_end"), py::arg("dt") = 1e-3, py::arg("seed") = 1,
      py::arg("record_interval") = py::none(),
      "Trajectory of the Dyson SDE; returns (times, angles[n_records, N]).");

  m.def(
      "sample_stationary",
      [](std::size_t n, double kappa, std::size_t n_samples, double dt, std::uint64_t seed,
         std::size_t threads) {
        auto p = make_params(n, kappa, dt, seed);
        p.threads = threads;
        SampleBatch b;
        {
          py::gil_scoped_release release;
          b = sample_stationary(p, n_samples);
        }
        return batch_array(b);
      },
      py::arg("n_particles"), py::arg("kappa"), py::arg("n_samples"), py::arg("dt") = 1e-3,
      py::arg("seed") = 1, py::arg("threads") = 0);

  m.def(
      "sample_matrix_ensemble",
      [](const std::string& source, std::size_t n, std::size_t n_samples, std::uint64_t seed) {
        return batch_array(sample_matrix_ensemble(sample_source_from_string(source), n, n_samples, seed));
      },
      py::arg("source"), py::arg("n"), py::arg("n_samples"), py::arg("seed") = 1,
      "source is one of COE, CUE, CSE.");

  m.def("gap_normalization", &gap_normalization_n2, py::arg("beta"));
  m.def(
      "gap_cdf",
      [](double beta, const std::vector<double>& s) {
        const GapCdf cdf(beta);
        std::vector<double> out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = cdf(s[i]);
        return out;
      },
      py::arg("beta"), py::arg("s"));
  m.def(
      "ks_gap",
      [](const std::vector<double>& gaps, double beta) {
        const GapCdf cdf(beta);
        return ks_statistic(gaps, [&](double x) { return cdf(x); });
      },
      py::arg("gaps"), py::arg("beta"), "One-sample KS distance of N=2 gaps against sin^beta(s/2).");
  m.def("ks_two_sample", &ks_two_sample, py::arg("a"), py::arg("b"));

  m.def(
      "one_arm_eigenvalue",
      [](double kappa, std::size_t m, const std::string& convention) {
        return lowest_eigenpair(build_adjoint_n2(kappa, m, time_convention_from_string(convention))).value;
      },
      py::arg("kappa"), py::arg("grid") = 4096, py::arg("convention") = "LSW_HALF");
  m.def(
      "one_arm_lambda_exact",
      [](double kappa, const std::string& convention) {
        return one_arm_lambda_exact(kappa, time_convention_from_string(convention));
      },
      py::arg("kappa"), py::arg("convention") = "LSW_HALF");
  m.def(
      "cs_spectrum",
      [](double kappa, std::size_t m, std::size_t k) {
        return lowest_decay_rates(build_cs_hamiltonian_n2(kappa, m), k);
      },
      py::arg("kappa"), py::arg("grid") = 1024, py::arg("levels") = 3,
      "Lowest levels of the reduced Calogero-Sutherland hamiltonian (Dyson clock).");

  m.def(
      "derivative_at_origin",
      [](const std::vector<double>& angles, double t) {
        return derivative_at_origin(DriveHistory::constant(AngleConfig(angles), t), t);
      },
      py::arg("angles"), py::arg("t"), "|G_t'(0)| for drivers frozen at the given angles.");

  m.def("beta_from_kappa", [](const std::string& k) { return pair(beta_from_kappa(kappa_of(k))); },
        py::arg("kappa"));
  m.def("kac_h_1_s", [](const std::string& k, std::int64_t p) { return pair(kac_h_1_s(kappa_of(k), p)); },
        py::arg("kappa"), py::arg("p"));
  m.def("fusion_exponent",
        [](std::int64_t p, const std::string& k) { return pair(fusion_exponent(p, kappa_of(k))); },
        py::arg("p"), py::arg("kappa"));
  m.def("ansatz_exponent",
        [](std::int64_t p, const std::string& b) { return pair(ansatz_exponent(p, Rational::parse(b))); },
        py::arg("p"), py::arg("beta"));
  m.def("h21", [](const std::string& k) { return pair(h21(kappa_of(k))); }, py::arg("kappa"));

  m.def(
      "validate",
      [](const std::vector<int>& criteria, bool quick, std::uint64_t seed) {
        ValidationOptions o;
        o.only = criteria;
        o.quick = quick;
        o.seed = seed;
        std::vector<CriterionReport> reports;
        {
          py::gil_scoped_release release;
          reports = run_validation(o);
        }
        py::list out;
        for (const auto& r : reports) {
          for (const auto& c : r.checks) {
            py::dict d;
            d["criterion_id"] = c.criterion_id;
            d["value"] = c.value;
            d["threshold"] = c.threshold;
            d["pass"] = c.pass;
            out.append(d);
          }
        }
        return out;
      },
      py::arg("criteria") = std::vector<int>{}, py::arg("quick") = true, py::arg("seed") = 1);
}
