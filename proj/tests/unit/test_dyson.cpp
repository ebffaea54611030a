#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "sledyson/circular_ensemble.hpp"
#include "sledyson/dyson_process.hpp"

using namespace sledyson;

namespace {

std::vector<double> numeric_gradient(const AngleConfig& c, double h = 1e-6) {
  std::vector<double> g(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    auto up = c.vector();
    auto dn = c.vector();
    up[j] += h;
    dn[j] -= h;
    g[j] = (potential(AngleConfig::wrapped(up)) - potential(AngleConfig::wrapped(dn))) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("drift is minus the gradient of the log-sine potential") {
  const AngleConfig c({0.3, 1.9, 2.4, 4.0, 5.7});
  const auto d = drift(c);
  const auto g = numeric_gradient(c);
  for (std::size_t j = 0; j < c.size(); ++j) CHECK(d[j] == doctest::Approx(-g[j]).epsilon(1e-7));
}

TEST_CASE("drift sums to zero") {
  const AngleConfig c({0.1, 0.7, 3.3, 5.0});
  const auto d = drift(c);
  CHECK(std::abs(std::accumulate(d.begin(), d.end(), 0.0)) < 1e-12);
}

TEST_CASE("two-particle drift is 2 cot(gap/2) on the gap") {
  const double s = 1.3;
  const auto d = drift(AngleConfig({0.5, 0.5 + s}));
  CHECK(d[1] - d[0] == doctest::Approx(2.0 / std::tan(0.5 * s)).epsilon(1e-12));
}

TEST_CASE("equally spaced configuration is a fixed point of the drift") {
  for (std::size_t n : {2u, 3u, 6u}) {
    for (double v : drift(AngleConfig::equally_spaced(n, 0.2))) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("a well-separated step is one Euler-Maruyama update") {
  ProcessParams p;
  p.n_particles = 3;
  p.kappa = 2.5;
  p.dt = 1e-4;
  const AngleConfig c({0.4, 2.5, 4.4});
  const std::vector<double> noise{0.3, -1.1, 0.7};
  const auto next = step(c, p, noise);
  const auto d = drift(c);
  for (std::size_t j = 0; j < 3; ++j) {
    const double expect = wrap_2pi(c[j] + d[j] * p.dt + std::sqrt(p.kappa * p.dt) * noise[j]);
    CHECK(next[j] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("the centre of mass follows the summed Brownian increments") {
  ProcessParams p;
  p.n_particles = 3;
  p.kappa = 3.0;
  p.dt = 1e-3;
  p.seed = 11;
  SimulateOptions o;
  o.record_increments = true;
  const auto rec = simulate(p, 20.0, AngleConfig::equally_spaced(3), o);
  REQUIRE(rec.states.size() == rec.brownian_increments.size());
  for (std::size_t k = 1; k < rec.states.size(); ++k) {
    double moved = 0.0;
    double noise = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      moved += wrap_pi(rec.states[k][j] - rec.states[k - 1][j]);
      noise += std::sqrt(p.kappa) * rec.brownian_increments[k][j];
    }
    CHECK(std::abs(wrap_pi(moved - noise)) < 1e-9);
  }
}

TEST_CASE("trajectories never reorder the particles") {
  for (double kappa : {1.0, 4.0, 8.0}) {
    ProcessParams p;
    p.n_particles = 4;
    p.kappa = kappa;
    p.seed = 5;
    const AngleConfig start({0.0, 0.05, 3.0, 3.05});
    const auto rec = simulate(p, 50.0, start);
    for (const auto& s : rec.states) {
      REQUIRE(same_cyclic_order(start.angles(), s.angles()));
      REQUIRE(s.min_gap() > 0.0);
    }
  }
}

TEST_CASE("simulation is reproducible from the seed") {
  ProcessParams p;
  p.seed = 42;
  p.n_particles = 3;
  const auto a = simulate(p, 2.0, AngleConfig::equally_spaced(3));
  const auto b = simulate(p, 2.0, AngleConfig::equally_spaced(3));
  CHECK(a.states == b.states);
  p.seed = 43;
  const auto c = simulate(p, 2.0, AngleConfig::equally_spaced(3));
  CHECK_FALSE(a.states == c.states);
}

TEST_CASE("stationary sampling does not depend on the thread count") {
  ProcessParams p;
  p.n_particles = 3;
  p.kappa = 2.0;
  p.chains = 8;
  p.burn_in = 2.0;
  p.thinning = 0.5;
  p.threads = 1;
  const auto a = sample_stationary(p, 64);
  p.threads = 3;
  const auto b = sample_stationary(p, 64);
  CHECK(a == b);
}

TEST_CASE("record interval thins the trajectory") {
  ProcessParams p;
  p.dt = 1e-3;
  SimulateOptions o;
  o.record_interval = 0.1;
  const auto rec = simulate(p, 1.0, AngleConfig::equally_spaced(2), o);
  CHECK(rec.times.size() == 11);
  CHECK(rec.times.back() == doctest::Approx(1.0));
}

TEST_CASE("stationary N=2 gap moment matches the beta=2 law") {
  // sin^2(s/2) density: E[cos s] = -1/2.
  ProcessParams p;
  p.kappa = 2.0;
  p.seed = 3;
  const auto batch = sample_stationary(p, 8000);
  double acc = 0.0;
  for (std::size_t i = 0; i < batch.rows(); ++i) acc += std::cos(batch.row(i)[1] - batch.row(i)[0]);
  CHECK(acc / static_cast<double>(batch.rows()) == doctest::Approx(-0.5).epsilon(0.06));
}

TEST_CASE("invalid parameters are rejected") {
  ProcessParams p;
  p.kappa = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.kappa = 2.0;
  p.dt = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.dt = 1e-3;
  CHECK_NOTHROW(p.validate());
  CHECK(default_burn_in(1) == doctest::Approx(10.0));
  CHECK(p.beta() == doctest::Approx(2.0));
}

TEST_CASE("drift and potential at simple configurations") {
  const auto d = drift(AngleConfig({0.0, kPi / 2.0}));
  CHECK(d[0] == doctest::Approx(-1.0));
  CHECK(d[1] == doctest::Approx(1.0));
  for (double v : drift(AngleConfig({0.0, kPi}))) CHECK(std::abs(v) < 1e-15);
  CHECK(std::abs(potential(AngleConfig({0.0, kPi}))) < 1e-15);
  CHECK(potential(AngleConfig({0.0, kPi / 3.0})) == doctest::Approx(2.0 * std::log(2.0)));
  CHECK(potential(AngleConfig::equally_spaced(3)) ==
        doctest::Approx(-6.0 * std::log(std::sqrt(3.0) / 2.0)));
}

TEST_CASE("noiseless step follows the drift") {
  ProcessParams p;
  p.dt = 1e-3;
  const std::vector<double> zero{0.0, 0.0};
  const auto next = step(AngleConfig({0.0, kPi / 2.0}), p, zero);
  CHECK(next[0] == doctest::Approx(kTwoPi - 1e-3).epsilon(1e-13));
  CHECK(next[1] == doctest::Approx(kPi / 2.0 + 1e-3).epsilon(1e-13));
  const std::vector<double> zero3{0.0, 0.0, 0.0};
  const auto eq = AngleConfig::equally_spaced(3);
  const auto same = step(eq, p, zero3);
  for (std::size_t j = 0; j < 3; ++j) CHECK(same[j] == doctest::Approx(eq[j]).epsilon(1e-13));
}

TEST_CASE("one-step variance is kappa dt") {
  ProcessParams p;
  p.kappa = 2.0;
  p.dt = 1e-4;
  const AngleConfig c({0.0, kPi});
  NormalStream rng(99);
  const int n = 100000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::vector<double> xi{rng(), rng()};
    const double x = wrap_pi(step(c, p, xi)[0] - c[0]);
    s += x;
    s2 += x * x;
  }
  const double var = s2 / n - (s / n) * (s / n);
  const double target = p.kappa * p.dt;
  CHECK(std::abs(var - target) < 3.0 * target * std::sqrt(2.0 / n));
}

TEST_CASE("vanishing noise relaxes to equal spacing") {
  ProcessParams p;
  p.n_particles = 4;
  p.kappa = 1e-12;
  p.dt = 1e-2;
  const auto rec = simulate(p, 30.0, AngleConfig({0.1, 0.5, 2.0, 4.0}));
  CHECK(rec.states.back().min_gap() == doctest::Approx(kPi / 2.0).epsilon(1e-6));
}

TEST_CASE("a single particle is uniform at stationarity") {
  ProcessParams p;
  p.n_particles = 1;
  p.kappa = 2.0;
  p.chains = 400;
  p.thinning = 5.0;
  const auto batch = sample_stationary(p, 4000);
  std::vector<int> bins(8, 0);
  for (std::size_t i = 0; i < batch.rows(); ++i) ++bins[static_cast<std::size_t>(batch.row(i)[0] / kTwoPi * 8.0)];
  for (int b : bins) CHECK(std::abs(b - 500) < 5.0 * std::sqrt(500.0));
}

TEST_CASE("drift is rotation invariant and steps commute with rotation") {
  ProcessParams p;
  p.n_particles = 4;
  p.kappa = 3.0;
  p.dt = 1e-4;
  const AngleConfig c({0.3, 1.4, 3.0, 5.1});
  const std::vector<double> noise{0.2, -0.5, 1.1, -0.9};
  const double r = 2.2;
  const auto d0 = drift(c);
  const auto d1 = drift(c.rotated(r));
  for (std::size_t j = 0; j < 4; ++j) CHECK(d1[j] == doctest::Approx(d0[j]).epsilon(1e-10));
  const auto a = step(c, p, noise).rotated(r);
  const auto b = step(c.rotated(r), p, noise);
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(wrap_pi(a[j] - b[j])) < 1e-12);
}

TEST_CASE("stationary batch is invariant under further evolution") {
  ProcessParams p;
  p.kappa = 2.0;
  p.seed = 21;
  const std::size_t n = 10000;
  const auto batch = sample_stationary(p, n);
  const auto later = evolve_batch(batch, p, 1.0, 77);
  std::vector<double> g0, g1;
  for (std::size_t i = 0; i < n; ++i) {
    g0.push_back(ccw_distance(batch.row(i)[0], batch.row(i)[1]));
    g1.push_back(ccw_distance(later.row(i)[0], later.row(i)[1]));
  }
  CHECK(ks_two_sample(g0, g1) < ks_threshold_two_sample(n, n));
}
