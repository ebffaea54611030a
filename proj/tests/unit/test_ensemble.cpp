#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "sledyson/circular_ensemble.hpp"

using namespace sledyson;

TEST_CASE("gap normalization agrees with the Gamma-function closed form") {
  for (double beta : {0.0, 0.5, 1.0, 1.5, 2.0, 4.0 / 3.0, 4.0, 7.3}) {
    CHECK(gap_normalization_n2(beta) ==
          doctest::Approx(gap_normalization_closed_form(beta)).epsilon(1e-11));
  }
  CHECK(gap_normalization_n2(0.0) == doctest::Approx(kTwoPi));
  CHECK(gap_normalization_n2(2.0) == doctest::Approx(kPi));
}

TEST_CASE("gap CDF matches elementary antiderivatives") {
  const GapCdf uniform(0.0);
  const GapCdf beta2(2.0);
  for (double s = 0.0; s <= kTwoPi; s += 0.0137) {
    CHECK(uniform(s) == doctest::Approx(s / kTwoPi).epsilon(1e-10));
    CHECK(beta2(s) == doctest::Approx((s - std::sin(s)) / kTwoPi).epsilon(1e-10));
  }
}

TEST_CASE("gap CDF is symmetric about pi and monotone") {
  for (double beta : {0.5, 1.5, 3.0}) {
    const GapCdf cdf(beta);
    CHECK(cdf(kPi) == doctest::Approx(0.5).epsilon(1e-12));
    double prev = 0.0;
    for (double s = 0.001; s < kTwoPi; s += 0.01) {
      const double f = cdf(s);
      CHECK(f >= prev);
      CHECK(f + cdf(kTwoPi - s) == doctest::Approx(1.0).epsilon(1e-10));
      prev = f;
    }
    CHECK(cdf(-1.0) == 0.0);
    CHECK(cdf(10.0) == 1.0);
  }
}

TEST_CASE("beta conventions map kappa as documented") {
  CHECK(beta_for(2.0) == doctest::Approx(2.0));
  CHECK(beta_for(2.0, BetaConvention::Cft2OverKappa) == doctest::Approx(1.0));
  CHECK(beta_for(2.0, BetaConvention::Erratum8OverKappa) == doctest::Approx(4.0));
  for (auto c : {BetaConvention::Dyson4OverKappa, BetaConvention::Cft2OverKappa,
                 BetaConvention::Erratum8OverKappa})
    CHECK(beta_convention_from_string(to_string(c)) == c);
  CHECK_THROWS(beta_convention_from_string("nope"));
}

TEST_CASE("Haar sampler returns unitary matrices") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 5u}) {
    const auto u = haar_unitary(n, rng);
    const auto id = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n),
                                               static_cast<Eigen::Index>(n));
    CHECK((u.adjoint() * u - id).norm() < 1e-12);
  }
}

TEST_CASE("Haar first entry has mean zero and E|U11|^2 = 1/n") {
  std::mt19937_64 rng(9);
  const std::size_t n = 3;
  const int draws = 20000;
  std::complex<double> mean = 0.0;
  double second = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto u = haar_unitary(n, rng);
    mean += u(0, 0);
    second += std::norm(u(0, 0));
  }
  CHECK(std::abs(mean) / draws < 0.02);
  CHECK(second / draws == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("CUE eigen-angles are uniform") {
  std::vector<double> angles;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto c = sample_cue(4, s);
    angles.insert(angles.end(), c.angles().begin(), c.angles().end());
  }
  const auto r = chi_square_uniform(angles, 20);
  CHECK(r.dof == 19);
  CHECK(r.p_value > 1e-3);
}

TEST_CASE("N=2 matrix ensemble gaps follow sin^beta(s/2)") {
  const std::size_t n = 4000;
  const struct {
    SampleSource source;
    double beta;
  } cases[] = {{SampleSource::Coe, 1.0}, {SampleSource::Cue, 2.0}, {SampleSource::Cse, 4.0}};
  for (const auto& c : cases) {
    const auto batch = sample_matrix_ensemble(c.source, 2, n, 17);
    const GapCdf cdf(c.beta);
    const double d = ks_statistic(single_gap_per_row(batch, 1), [&](double s) { return cdf(s); });
    CHECK(d < ks_threshold_one_sample(n, 0.001));
  }
}

TEST_CASE("CSE reports each Kramers pair once") {
  const auto c = sample_cse(3, 5);
  CHECK(c.size() == 3);
}

TEST_CASE("KS statistics on known inputs") {
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100.0);
  CHECK(ks_statistic(grid, [](double x) { return x; }) == doctest::Approx(0.005));
  CHECK(ks_two_sample(grid, grid) == 0.0);
  std::vector<double> shifted = grid;
  for (double& x : shifted) x += 10.0;
  CHECK(ks_two_sample(grid, shifted) == doctest::Approx(1.0));
  CHECK(ks_threshold_one_sample(10000, 0.01) ==
        doctest::Approx(std::sqrt(-std::log(0.005) / 2.0) / 100.0));
  CHECK(ks_threshold_two_sample(100, 100, 0.01) ==
        doctest::Approx(std::sqrt(-std::log(0.005) / 2.0) * std::sqrt(0.02)));
}

TEST_CASE("chi-square of an exactly uniform sample is zero") {
  std::vector<double> a;
  for (int i = 0; i < 1000; ++i) a.push_back((i + 0.5) * kTwoPi / 1000.0);
  const auto r = chi_square_uniform(a, 10);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("gap extraction") {
  SampleMeta m;
  m.n_particles = 3;
  SampleBatch b(m, 2);
  b.set_row(0, AngleConfig({1.0, 5.0, 3.0}));
  b.set_row(1, AngleConfig({0.5, 0.2, 6.0}));
  const auto gaps = pairwise_gap_statistics(b);
  REQUIRE(gaps.size() == 6);
  CHECK(gaps[0] + gaps[1] + gaps[2] == doctest::Approx(kTwoPi));
  CHECK(gaps[3] + gaps[4] + gaps[5] == doctest::Approx(kTwoPi));
  const auto lab = labeled_gaps(b, 0, 2);
  CHECK(lab[0] == doctest::Approx(2.0));
  CHECK(lab[1] == doctest::Approx(5.5));
  for (double g : single_gap_per_row(b, 3)) CHECK((g > 0.0 && g < kTwoPi));
}

TEST_CASE("log density is beta times the log chord sum") {
  const AngleConfig c({0.0, kPi});
  CHECK(log_density_unnormalized(c, 2.0) == doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("log density at chord-length configurations") {
  CHECK(log_density_unnormalized(AngleConfig({0.0, kPi}), 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(std::abs(log_density_unnormalized(AngleConfig({0.0, kPi / 3.0}), 2.0)) < 1e-14);
  CHECK(log_density_unnormalized(AngleConfig({0.3, 1.0, 5.0}), 0.0) == 0.0);
  CHECK_THROWS_AS(log_density_unnormalized(AngleConfig::wrapped({0.0, kTwoPi - 1e-300}), 1.0), DomainError);
}

TEST_CASE("log density relates to the SDE potential") {
  // beta = 4/kappa: log density = -(2/kappa) V + beta * (N(N-1)/2) ln 2.
  const AngleConfig c({0.2, 1.7, 3.1, 5.2});
  const double kappa = 8.0 / 3.0;
  const double v = -2.0 * [&] {
    double acc = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = j + 1; k < 4; ++k) acc += std::log(std::abs(std::sin(0.5 * (c[j] - c[k]))));
    return acc;
  }();
  CHECK(log_density_unnormalized(c, 4.0 / kappa) ==
        doctest::Approx(-(2.0 / kappa) * v + (4.0 / kappa) * 6.0 * std::log(2.0)));
}

TEST_CASE("beta = 1 gap normalization is 4") { CHECK(gap_normalization_n2(1.0) == doctest::Approx(4.0)); }

TEST_CASE("gaps of simple rows") {
  SampleMeta m;
  m.n_particles = 2;
  SampleBatch b(m, 1);
  b.set_row(0, AngleConfig({0.0, kPi}));
  const auto g = pairwise_gap_statistics(b);
  CHECK(g[0] == doctest::Approx(kPi));
  CHECK(g[1] == doctest::Approx(kPi));
  m.n_particles = 4;
  SampleBatch e(m, 1);
  e.set_row(0, AngleConfig::equally_spaced(4));
  for (double x : pairwise_gap_statistics(e)) CHECK(x == doctest::Approx(kPi / 2.0));
}

TEST_CASE("one-by-one ensembles give a uniform angle") {
  std::vector<double> a;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    a.push_back(sample_cue(1, s)[0]);
    a.push_back(sample_coe(1, s)[0]);
  }
  CHECK(chi_square_uniform(a, 16).p_value > 1e-3);
}

namespace {

double uniformity_p_value(bool phase_correct) {
  std::mt19937_64 rng(3);
  std::vector<double> a;
  for (int i = 0; i < 5000; ++i) {
    const Eigen::MatrixXcd u = haar_unitary(3, rng, phase_correct);
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
    for (Eigen::Index k = 0; k < 3; ++k) a.push_back(wrap_2pi(std::arg(es.eigenvalues()[k])));
  }
  return chi_square_uniform(a, 20).p_value;
}

}  // namespace

TEST_CASE("QR without phase correction is not Haar") {
  CHECK(uniformity_p_value(true) > 1e-3);
  CHECK(uniformity_p_value(false) < 1e-6);
}

TEST_CASE("log density is rotation and permutation invariant") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a{u(rng), u(rng), u(rng), u(rng)};
    const AngleConfig c(a);
    const double base = log_density_unnormalized(c, 1.7);
    CHECK(log_density_unnormalized(c.rotated(u(rng)), 1.7) == doctest::Approx(base).epsilon(1e-12));
    std::swap(a[0], a[3]);
    CHECK(log_density_unnormalized(AngleConfig(a), 1.7) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("beta=2 gap CDF on a fine grid") {
  const GapCdf cdf(2.0);
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double s = kTwoPi * i / 10000.0;
    worst = std::max(worst, std::abs(cdf(s) - (s - std::sin(s)) / kTwoPi));
  }
  CHECK(worst < 1e-9);
}
