#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sledyson/angles.hpp"
#include "sledyson/spectral.hpp"

using namespace sledyson;

TEST_CASE("clock conventions differ by a factor two") {
  CHECK(time_factor(TimeConvention::Dyson) == 2.0 * time_factor(TimeConvention::LswHalf));
  CHECK(one_arm_lambda_exact(6.0, TimeConvention::Dyson) ==
        doctest::Approx(2.0 * one_arm_lambda_exact(6.0, TimeConvention::LswHalf)));
  CHECK(one_arm_lambda_exact(6.0) == doctest::Approx(5.0 / 48.0));
  CHECK(time_convention_from_string(to_string(TimeConvention::Dyson)) == TimeConvention::Dyson);
  CHECK_THROWS(time_convention_from_string("HOURS"));
}

TEST_CASE("grids") {
  const auto c = Grid::closed(32);
  CHECK(c.size() == 33);
  CHECK(c.node(32) == doctest::Approx(kTwoPi));
  const auto i = Grid::interior(32);
  CHECK(i.size() == 31);
  CHECK(i.node(0) == doctest::Approx(kTwoPi / 32.0));
  CHECK(i.spacing() == doctest::Approx(kTwoPi / 32.0));
}

TEST_CASE("laplacian spectra on an interval") {
  const Grid g{0.0, kPi, 1000};
  const Boundary neu{BoundaryKind::Neumann, 0.0};
  const Boundary dir{BoundaryKind::Dirichlet, 0.0};
  const auto nn = lowest_decay_rates(build_laplacian(g, neu, neu), 3);
  CHECK(std::abs(nn[0]) < 1e-9);
  CHECK(nn[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(nn[2] == doctest::Approx(4.0).epsilon(1e-5));
  const auto dd = lowest_decay_rates(build_laplacian(g, dir, dir), 2);
  CHECK(dd[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(dd[1] == doctest::Approx(4.0).epsilon(1e-5));
  const auto nd = lowest_eigenpair(build_laplacian(g, neu, dir));
  CHECK(nd.value == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(nd.function.front() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("adjoint generator reproduces the one-arm rate") {
  for (double kappa : {5.0, 6.0, 8.0}) {
    const auto op = build_adjoint_n2(kappa, 2048, TimeConvention::LswHalf);
    const auto e = lowest_eigenpair(op);
    CHECK(e.value == doctest::Approx(one_arm_lambda_exact(kappa)).epsilon(1e-6));
    CHECK(*std::min_element(e.function.begin() + 1, e.function.end()) > 0.0);
    CHECK(*std::max_element(e.function.begin(), e.function.end()) == doctest::Approx(1.0));
  }
}

TEST_CASE("adjoint eigenvalue converges at second order") {
  const double exact = one_arm_lambda_exact(6.0);
  const double e1 = std::abs(lowest_eigenpair(build_adjoint_n2(6.0, 256, TimeConvention::LswHalf)).value - exact);
  const double e2 = std::abs(lowest_eigenpair(build_adjoint_n2(6.0, 512, TimeConvention::LswHalf)).value - exact);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("absorbing branch only exists above kappa = 4") {
  CHECK_THROWS_AS(build_adjoint_n2(3.0, 256, TimeConvention::LswHalf), DomainError);
  CHECK_NOTHROW(build_adjoint_n2(3.0, 256, TimeConvention::LswHalf, FrobeniusBranch::Constant));
  CHECK(one_arm_exponent_alpha(8.0) == doctest::Approx(0.5));
}

TEST_CASE("reflecting adjoint has zero ground rate") {
  const auto e = lowest_eigenpair(build_adjoint_n2(3.0, 512, TimeConvention::Dyson, FrobeniusBranch::Constant));
  CHECK(std::abs(e.value) < 1e-9);
}

TEST_CASE("Frobenius factor and reduced potential") {
  CHECK(frobenius_factor(1.3, 0.0) == 1.0);
  CHECK(frobenius_factor(2.0, 0.5) == doctest::Approx(std::sqrt(2.0) * std::exp(-0.5 * 4.0 / (8.0 * kPi * kPi))));
  const double a = one_arm_exponent_alpha(6.0);
  for (double t : {0.0, 1e-8, 1.0, kTwoPi - 1e-8, kTwoPi}) CHECK(std::isfinite(reduced_potential(t, a, 6.0)));
  CHECK(reduced_potential(1e-7, a, 6.0) == doctest::Approx(reduced_potential(0.0, a, 6.0)).epsilon(1e-5));
}

TEST_CASE("Fokker-Planck generator conserves mass and fixes its equilibrium") {
  const auto fp = build_fp_generator_n2(3.0, 512);
  const auto pi = discrete_equilibrium(fp, 3.0);
  CHECK(std::accumulate(pi.begin(), pi.end(), 0.0) == doctest::Approx(1.0));
  const auto r = fp.apply(pi);
  CHECK(*std::max_element(r.begin(), r.end(), [](double x, double y) { return std::abs(x) < std::abs(y); }) ==
        doctest::Approx(0.0));
  std::vector<double> ones(fp.size(), 1.0);
  for (double v : fp.apply_transpose(ones)) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("stationarity residual converges at second order") {
  const double r1 = stationarity_residual(3.0, 256, kPi / 4.0, 7.0 * kPi / 4.0);
  const double r2 = stationarity_residual(3.0, 512, kPi / 4.0, 7.0 * kPi / 4.0);
  CHECK(std::log2(r1 / r2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("duality defect converges at second order") {
  const double d1 = duality_defect(3.0, 256);
  const double d2 = duality_defect(3.0, 512);
  CHECK(std::log2(d1 / d2) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("CS hamiltonian is symmetric with zero ground energy") {
  for (double kappa : {2.0, 3.0, 6.0}) {
    const auto h = build_cs_hamiltonian_n2(kappa, 1024);
    CHECK(symmetry_defect(h) < 1e-10);
    const auto e = lowest_eigenpair(h);
    CHECK(std::abs(e.value) < 1e-8);
    const auto pi = discrete_equilibrium(build_fp_generator_n2(kappa, 1024), kappa);
    std::vector<double> root(pi.size());
    std::transform(pi.begin(), pi.end(), root.begin(), [](double x) { return std::sqrt(x); });
    CHECK(overlap(h.grid, e.function, root) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("free-fermion point has the sine spectrum") {
  // kappa = 2: H = -2 d^2 - 1/2 on sin(k theta/2), energies (k^2 - 1)/2.
  const auto rates = lowest_decay_rates(build_cs_hamiltonian_n2(2.0, 2048), 3);
  CHECK(std::abs(rates[0]) < 1e-8);
  CHECK(rates[1] == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(rates[2] == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("Fokker-Planck relaxation equals the first CS gap") {
  for (double kappa : {2.0, 3.0, 6.0}) {
    const double fp = fp_relaxation_rate(build_fp_generator_n2(kappa, 512));
    const auto h = lowest_decay_rates(build_cs_hamiltonian_n2(kappa, 512), 2);
    CHECK(fp == doctest::Approx(h[1]).epsilon(1e-8));
  }
}

TEST_CASE("CS potential in the two clocks") {
  CHECK(cs_potential_n2(kPi, 2.0) == doctest::Approx(-0.5));
  CHECK(cs_potential_n2(1.0, 6.0, TimeConvention::Dyson) ==
        doctest::Approx(2.0 * cs_potential_n2(1.0, 6.0, TimeConvention::LswHalf)));
}

TEST_CASE("overlap is a normalized inner product") {
  const auto g = Grid::closed(64);
  std::vector<double> f(g.size(), 2.0);
  std::vector<double> h(g.size(), 5.0);
  CHECK(overlap(g, f, h) == doctest::Approx(1.0));
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::cos(g.node(i));
  CHECK(std::abs(overlap(g, f, s)) < 1e-12);
}

TEST_CASE("survival probability") {
  const std::vector<double> times{0.0, 5.0, 10.0};
  for (double v : survival_probability(3.0, 1.0, times)) CHECK(v == 1.0);
  const auto h = survival_probability(6.0, kPi, times);
  CHECK(h[0] == 1.0);
  CHECK(h[1] < 1.0);
  CHECK(h[2] < h[1]);
  CHECK(survival_decay_rate(6.0, kPi, 5.0, 15.0) == doctest::Approx(5.0 / 48.0).epsilon(0.02));
}

TEST_CASE("reduced and function values round trip") {
  const auto op = build_adjoint_n2(6.0, 128, TimeConvention::LswHalf);
  std::vector<double> u(op.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1.0 + 0.01 * static_cast<double>(i);
  const auto back = op.to_reduced(op.to_function(u));
  for (std::size_t i = 1; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-12));
  const auto dense = op.dense();
  const auto au = op.apply(u);
  for (std::size_t i = 1; i < u.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) acc += dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * u[j];
    CHECK(acc == doctest::Approx(au[i]).epsilon(1e-10));
  }
}

TEST_CASE("one-arm rate at reference values") {
  CHECK(one_arm_lambda_exact(4.0) == 0.0);
  CHECK(one_arm_lambda_exact(8.0) == doctest::Approx(3.0 / 16.0));
}

TEST_CASE("one-arm eigenfunction is sin(theta/4)^(1-4/kappa)") {
  const double kappa = 6.0;
  const auto op = build_adjoint_n2(kappa, 4096, TimeConvention::LswHalf);
  const auto e = lowest_eigenpair(op);
  CHECK(e.value == doctest::Approx(5.0 / 48.0).epsilon(1e-6));
  std::vector<double> exact(op.grid.size());
  for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = std::pow(std::sin(op.grid.node(i) / 4.0), 1.0 / 3.0);
  CHECK(overlap(op.grid, e.function, exact) > 0.999999);
}

TEST_CASE("reflecting adjoint annihilates constants") {
  const auto op = build_adjoint_n2(6.0, 256, TimeConvention::Dyson, FrobeniusBranch::Constant);
  const std::vector<double> ones(op.size(), 1.0);
  for (double v : op.apply(op.to_reduced(ones))) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("CS ground state matches sin^(2/kappa)(theta/2)") {
  const double kappa = 3.0;
  const auto h = build_cs_hamiltonian_n2(kappa, 4096);
  const auto e = lowest_eigenpair(h);
  CHECK(std::abs(e.value) < 1e-3);
  std::vector<double> exact(h.grid.size());
  for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = std::pow(std::sin(0.5 * h.grid.node(i)), 2.0 / kappa);
  CHECK(overlap(h.grid, e.function, exact) > 0.999);
}

TEST_CASE("kappa = 4 equilibrium is sin(theta/2)") {
  const auto g = Grid::interior(64);
  const auto p = equilibrium_density_n2(4.0, g);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(std::sin(0.5 * g.node(i))));
}
