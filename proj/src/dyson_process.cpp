#include "sledyson/dyson_process.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/Dense>

namespace sledyson {

double default_burn_in(std::size_t n) { return 10.0 + 2.0 * std::log(static_cast<double>(n)); }

double ProcessParams::effective_burn_in() const {
  return burn_in ? *burn_in : default_burn_in(n_particles);
}

void ProcessParams::validate() const {
  if (n_particles < 1) throw DomainError("n_particles must be >= 1");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be > 0");
  if (!(thinning >= dt)) throw DomainError("thinning must be >= dt");
  if (burn_in && !(*burn_in >= 0.0)) throw DomainError("burn_in must be >= 0");
  if (chains < 1) throw DomainError("chains must be >= 1");
}

std::vector<double> drift(const AngleConfig& config) {
  const std::size_t n = config.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double x = 0.5 * wrap_pi(config[j] - config[k]);
      if (x == 0.0) throw DomainError("drift: coincident angles");
      const double c = 1.0 / std::tan(x);
      d[j] += c;
      d[k] -= c;
    }
  }
  return d;
}

double potential(const AngleConfig& config) {
  double v = 0.0;
  for (std::size_t j = 0; j < config.size(); ++j)
    for (std::size_t k = j + 1; k < config.size(); ++k) {
      const double s = std::abs(std::sin(0.5 * wrap_pi(config[j] - config[k])));
      if (s == 0.0) throw DomainError("potential: coincident angles (V = +inf)");
      v -= 2.0 * std::log(s);
    }
  return v;
}

namespace {

// Euler-Maruyama with recursive Brownian-bridge halving. The cyclic order
// is fixed at construction; accepted steps never change it.
class Integrator {
 public:
  Integrator(std::span<const double> initial, double kappa)
      : n_(initial.size()), kappa_(kappa), sqrt_kappa_(std::sqrt(kappa)) {
    order_ = circular_order(initial);
    // Fixed size: recursion holds references into work_.
    work_.resize(kMaxHalvings + 1);
  }

  void advance(std::vector<double>& theta, double dt, std::span<const double> dB, int depth,
               ParticleStreams& refine) {
    Work& w = work_[static_cast<std::size_t>(depth)];
    w.resize(n_);

    double max_drift = 0.0;
    std::fill(w.drift.begin(), w.drift.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = j + 1; k < n_; ++k) {
        const double c = 1.0 / std::tan(0.5 * wrap_pi(theta[j] - theta[k]));
        w.drift[j] += c;
        w.drift[k] -= c;
      }
    for (double d : w.drift) max_drift = std::max(max_drift, std::abs(d));

    double min_gap = kTwoPi;
    for (std::size_t i = 0; i < n_ && n_ > 1; ++i) {
      w.gap[i] = ccw_distance(theta[order_[i]], theta[order_[(i + 1) % n_]]);
      min_gap = std::min(min_gap, w.gap[i]);
    }

    const bool near = n_ > 1 && min_gap < 4.0 * std::sqrt(kappa_ * dt) + 4.0 * max_drift * dt;
    if (!near || depth == kMaxHalvings) {
      bool ok = true;
      for (std::size_t j = 0; j < n_; ++j) w.delta[j] = w.drift[j] * dt + sqrt_kappa_ * dB[j];
      for (std::size_t i = 0; i < n_ && n_ > 1 && ok; ++i)
        ok = w.gap[i] + w.delta[order_[(i + 1) % n_]] - w.delta[order_[i]] > 0.0;
      if (ok) {
        for (std::size_t j = 0; j < n_; ++j) w.proposed[j] = wrap_2pi(theta[j] + w.delta[j]);
        ok = n_ == 1 || !ordering_broken(w.proposed);
      }
      if (ok) {
        std::copy(w.proposed.begin(), w.proposed.end(), theta.begin());
        return;
      }
      if (depth == kMaxHalvings) {
        if (!implicit_step(theta, dt, dB, w)) {
          throw IntegratorError("Dyson step: collision not resolved after " +
                                std::to_string(kMaxHalvings) + " halvings; reduce dt");
        }
        std::copy(w.proposed.begin(), w.proposed.end(), theta.begin());
        return;
      }
    }

    // Brownian bridge split of dB into two halves.
    refine.fill(w.xi);
    const double half_sd = 0.5 * std::sqrt(dt);
    for (std::size_t j = 0; j < n_; ++j) {
      w.first[j] = 0.5 * dB[j] + half_sd * w.xi[j];
      w.second[j] = dB[j] - w.first[j];
    }
    advance(theta, 0.5 * dt, w.first, depth + 1, refine);
    advance(theta, 0.5 * dt, w.second, depth + 1, refine);
  }

 private:
  struct Work {
    std::vector<double> drift, gap, delta, proposed, xi, first, second;
    void resize(std::size_t n) {
      if (drift.size() == n) return;
      for (auto* v : {&drift, &gap, &delta, &proposed, &xi, &first, &second}) v->assign(n, 0.0);
    }
  };

  // Drift-implicit Euler, y = c + dt b(y) with c = theta + sqrt(kappa) dB,
  // as the minimizer of |y - c|^2/2 + dt V(y) over the ordering chamber
  // (strictly convex there, V is a barrier). Damped Newton from the current
  // state never leaves the chamber, so the result preserves the cyclic order.
  bool implicit_step(const std::vector<double>& theta, double dt, std::span<const double> dB, Work& w) {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::VectorXd x(n), c(n), y(n), grad(n), trial(n);
    x[0] = theta[order_[0]];
    for (Eigen::Index i = 1; i < n; ++i) {
      x[i] = x[i - 1] + ccw_distance(theta[order_[i - 1]], theta[order_[i]]);
    }
    for (Eigen::Index i = 0; i < n; ++i) c[i] = x[i] + sqrt_kappa_ * dB[order_[i]];

    auto inside = [&](const Eigen::VectorXd& v) {
      for (Eigen::Index i = 0; i + 1 < n; ++i)
        if (!(v[i + 1] > v[i])) return false;
      return v[n - 1] - v[0] < kTwoPi;
    };
    auto objective = [&](const Eigen::VectorXd& v) {
      double g = 0.5 * (v - c).squaredNorm();
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = i + 1; k < n; ++k) g -= 2.0 * dt * std::log(std::sin(0.5 * (v[k] - v[i])));
      return g;
    };

    y = x;
    Eigen::MatrixXd hess(n, n);
    for (int it = 0; it < 200; ++it) {
      grad = y - c;
      hess.setIdentity();
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = i + 1; k < n; ++k) {
          const double u = 0.5 * (y[k] - y[i]);
          const double cot = 1.0 / std::tan(u);
          const double csc2 = 1.0 + cot * cot;
          // b_i = sum_k cot((y_i - y_k)/2); grad = y - c - dt b.
          grad[i] += dt * cot;
          grad[k] -= dt * cot;
          const double h = 0.5 * dt * csc2;
          hess(i, i) += h;
          hess(k, k) += h;
          hess(i, k) -= h;
          hess(k, i) -= h;
        }
      const double scale = 1.0 + c.cwiseAbs().maxCoeff();
      if (grad.cwiseAbs().maxCoeff() <= 1e-15 * scale) break;
      const Eigen::VectorXd dir = -hess.ldlt().solve(grad);
      const double g0 = objective(y);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        trial = y + alpha * dir;
        if (inside(trial) && objective(trial) <= g0 + 1e-4 * alpha * grad.dot(dir)) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      const double change = (trial - y).cwiseAbs().maxCoeff();
      y = trial;
      if (change <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
    }
    if (!inside(y) || (y - c - dt * pair_drift(y)).cwiseAbs().maxCoeff() > 1e-9) return false;
    for (Eigen::Index i = 0; i < n; ++i) w.proposed[order_[i]] = wrap_2pi(y[i]);
    return !ordering_broken(w.proposed);
  }

  Eigen::VectorXd pair_drift(const Eigen::VectorXd& y) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
      for (Eigen::Index k = i + 1; k < y.size(); ++k) {
        const double cot = 1.0 / std::tan(0.5 * (y[i] - y[k]));
        b[i] += cot;
        b[k] -= cot;
      }
    return b;
  }

  // Wrapping may turn a gap of a few ulps into zero; treat that as a collision.
  bool ordering_broken(const std::vector<double>& theta) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (theta[order_[i]] == theta[order_[(i + 1) % n_]]) return true;
    return false;
  }

  std::size_t n_;
  double kappa_;
  double sqrt_kappa_;
  std::vector<std::size_t> order_;
  std::vector<Work> work_;
};

std::size_t steps_for(double duration, double dt) {
  return static_cast<std::size_t>(std::max<long long>(1, std::llround(duration / dt)));
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, jobs));
}

template <class F>
void parallel_for(std::size_t jobs, std::size_t threads, F&& body) {
  const std::size_t workers = worker_count(threads, jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < jobs && !failed;) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

AngleConfig step(const AngleConfig& config, const ProcessParams& params,
                 std::span<const double> noise, ParticleStreams& refine) {
  if (noise.size() != config.size()) throw DomainError("step: noise size mismatch");
  const double sqrt_dt = std::sqrt(params.dt);
  std::vector<double> dB(noise.begin(), noise.end());
  for (double& x : dB) x *= sqrt_dt;
  std::vector<double> theta = config.vector();
  Integrator integrator(theta, params.kappa);
  integrator.advance(theta, params.dt, dB, 0, refine);
  return AngleConfig(std::move(theta));
}

AngleConfig step(const AngleConfig& config, const ProcessParams& params,
                 std::span<const double> noise) {
  ParticleStreams refine(params.seed, 0x5EF1E000ULL, config.size());
  return step(config, params, noise, refine);
}

TrajectoryRecord simulate(const ProcessParams& params, double t_end, const AngleConfig& initial,
                          const SimulateOptions& options) {
  params.validate();
  if (!(t_end > 0.0)) throw DomainError("simulate: t_end must be > 0");
  if (initial.size() != params.n_particles)
    throw DomainError("simulate: initial configuration has wrong size");

  const std::size_t n = params.n_particles;
  const std::size_t n_steps = steps_for(t_end, params.dt);
  const double dt = t_end / static_cast<double>(n_steps);
  const std::size_t every =
      options.record_interval ? steps_for(*options.record_interval, dt) : std::size_t{1};

  ParticleStreams noise(params.seed, 2 * options.stream, n);
  ParticleStreams refine(params.seed, 2 * options.stream + 1, n);
  Integrator integrator(initial.angles(), params.kappa);

  TrajectoryRecord rec;
  rec.times.push_back(0.0);
  rec.states.push_back(initial);
  if (options.record_increments) rec.brownian_increments.emplace_back(n, 0.0);

  std::vector<double> theta = initial.vector();
  std::vector<double> xi(n), dB(n), acc(n, 0.0);
  const double sqrt_dt = std::sqrt(dt);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    noise.fill(xi);
    for (std::size_t j = 0; j < n; ++j) dB[j] = sqrt_dt * xi[j];
    integrator.advance(theta, dt, dB, 0, refine);
    if (options.record_increments)
      for (std::size_t j = 0; j < n; ++j) acc[j] += dB[j];
    if (s % every == 0 || s == n_steps) {
      rec.times.push_back(static_cast<double>(s) * dt);
      rec.states.emplace_back(theta);
      if (options.record_increments) {
        rec.brownian_increments.push_back(acc);
        std::fill(acc.begin(), acc.end(), 0.0);
      }
    }
  }
  return rec;
}

SampleBatch sample_stationary(const ProcessParams& params, std::size_t n_samples) {
  params.validate();
  if (n_samples == 0) throw DomainError("sample_stationary: n_samples must be positive");
  const std::size_t n = params.n_particles;
  const std::size_t chains = std::min(params.chains, n_samples);
  const double burn_in = params.effective_burn_in();

  SampleMeta meta;
  meta.created_by = SampleSource::DysonSde;
  meta.n_particles = n;
  meta.kappa = params.kappa;
  meta.beta = params.beta();
  meta.seed = params.seed;
  meta.dt = params.dt;
  meta.burn_in = burn_in;
  meta.thinning = params.thinning;
  SampleBatch batch(meta, n_samples);

  std::vector<std::size_t> first(chains + 1, 0);
  for (std::size_t c = 0; c < chains; ++c)
    first[c + 1] = first[c] + n_samples / chains + (c < n_samples % chains ? 1 : 0);

  const std::size_t burn_steps =
      burn_in > 0.0 ? static_cast<std::size_t>(std::llround(burn_in / params.dt)) : 0;
  const std::size_t thin_steps = steps_for(params.thinning, params.dt);
  const double sqrt_dt = std::sqrt(params.dt);

  parallel_for(chains, params.threads, [&](std::size_t c) {
    NormalStream offset_stream(derive_seed(params.seed, 0x0FF5E7ULL, c));
    const AngleConfig start = AngleConfig::equally_spaced(n, kTwoPi * offset_stream.uniform());
    ParticleStreams noise(params.seed, 2 * (c + 1), n);
    ParticleStreams refine(params.seed, 2 * (c + 1) + 1, n);
    Integrator integrator(start.angles(), params.kappa);
    std::vector<double> theta = start.vector();
    std::vector<double> dB(n);
    auto run = [&](std::size_t steps) {
      for (std::size_t s = 0; s < steps; ++s) {
        noise.fill(dB);
        for (double& x : dB) x *= sqrt_dt;
        integrator.advance(theta, params.dt, dB, 0, refine);
      }
    };
    run(burn_steps);
    for (std::size_t r = first[c]; r < first[c + 1]; ++r) {
      run(thin_steps);
      const double t =
          burn_in + static_cast<double>(r - first[c] + 1) * static_cast<double>(thin_steps) * params.dt;
      batch.set_row(r, AngleConfig(theta), t);
    }
  });
  return batch;
}

SampleBatch evolve_batch(const SampleBatch& batch, const ProcessParams& params, double duration,
                         std::uint64_t seed) {
  params.validate();
  if (batch.cols() != params.n_particles) throw DomainError("evolve_batch: size mismatch");
  SampleBatch out = batch;
  const std::size_t n = params.n_particles;
  const std::size_t steps = steps_for(duration, params.dt);
  const double dt = duration / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);
  parallel_for(batch.rows(), params.threads, [&](std::size_t r) {
    ParticleStreams noise(seed, 2 * r, n);
    ParticleStreams refine(seed, 2 * r + 1, n);
    auto row = batch.row(r);
    std::vector<double> theta(row.begin(), row.end());
    Integrator integrator(theta, params.kappa);
    std::vector<double> dB(n);
    for (std::size_t s = 0; s < steps; ++s) {
      noise.fill(dB);
      for (double& x : dB) x *= sqrt_dt;
      integrator.advance(theta, dt, dB, 0, refine);
    }
    out.set_row(r, AngleConfig(theta), batch.times()[r] + duration);
  });
  return out;
}

}  // namespace sledyson
