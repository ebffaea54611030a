#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sledyson/angles.hpp"
#include "sledyson/rng.hpp"
#include "sledyson/sample_batch.hpp"

// Circular Dyson Brownian motion
//
//   d theta_j = sum_{k != j} cot((theta_j - theta_k)/2) dt + sqrt(kappa) dB_j,
//
// the driving process of N radial SLEs with a common origin. Its stationary
// law is the circular beta-ensemble with beta = 4/kappa.

namespace sledyson {

struct ProcessParams {
  std::size_t n_particles = 2;
  double kappa = 2.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  /// Discarded relaxation time; `default_burn_in(n)` when empty.
  std::optional<double> burn_in;
  /// Process time between retained samples.
  double thinning = 1.0;
  /// Independent chains used by sample_stationary.
  std::size_t chains = 64;
  /// Worker threads; 0 picks hardware concurrency. Output does not depend on it.
  std::size_t threads = 0;

  double beta() const { return 4.0 / kappa; }
  double effective_burn_in() const;
  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// 10 + 2 ln N process-time units.
double default_burn_in(std::size_t n);

/// Step refinement limit: a step still rejected after this many halvings
/// is a hard error.
inline constexpr int kMaxHalvings = 20;

std::vector<double> drift(const AngleConfig& config);
/// V = -2 sum_{j<k} ln|sin((theta_j - theta_k)/2)|.
double potential(const AngleConfig& config);

/// One Euler-Maruyama step of length params.dt with the given standard
/// normal draws. Near-collisions are resolved by recursive halving along a
/// Brownian bridge; bridge draws come from `refine`.
AngleConfig step(const AngleConfig& config, const ProcessParams& params,
                 std::span<const double> noise, ParticleStreams& refine);
/// As above with the refinement stream derived from params.seed.
AngleConfig step(const AngleConfig& config, const ProcessParams& params,
                 std::span<const double> noise);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<AngleConfig> states;
  /// Brownian increments B_j(t_k) - B_j(t_{k-1}); empty unless requested.
  std::vector<std::vector<double>> brownian_increments;
};

struct SimulateOptions {
  /// Spacing of recorded states; params.dt when empty.
  std::optional<double> record_interval;
  bool record_increments = false;
  /// Stream address under params.seed.
  std::uint64_t stream = 0;
};

TrajectoryRecord simulate(const ProcessParams& params, double t_end, const AngleConfig& initial,
                          const SimulateOptions& options = {});

/// Stationary draws from independent chains; rows ordered by chain then time.
SampleBatch sample_stationary(const ProcessParams& params, std::size_t n_samples);

/// Evolve every row of `batch` independently for `duration`, with streams
/// derived from `seed`.
SampleBatch evolve_batch(const SampleBatch& batch, const ProcessParams& params, double duration,
                         std::uint64_t seed);

}  // namespace sledyson
