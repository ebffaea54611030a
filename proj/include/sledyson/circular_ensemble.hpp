#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sledyson/angles.hpp"
#include "sledyson/sample_batch.hpp"

namespace sledyson {

/// Which beta a given kappa maps to.
///   Dyson4OverKappa    beta = 4/kappa, the stationary law of the SDE (default)
///   Cft2OverKappa      beta = 2/kappa, what the boundary OPE of the 1-leg
///                      operators reproduces when the transfer operator is
///                      taken self-adjoint
///   Erratum8OverKappa  beta = 8/kappa, the Calogero-Sutherland coupling once
///                      the measure carries the boundary conformal factor
enum class BetaConvention { Dyson4OverKappa, Cft2OverKappa, Erratum8OverKappa };

double beta_for(double kappa, BetaConvention convention = BetaConvention::Dyson4OverKappa);
std::string to_string(BetaConvention c);
BetaConvention beta_convention_from_string(const std::string& s);

struct EnsembleSpec {
  std::size_t n_particles = 2;
  double beta = 2.0;
  BetaConvention convention = BetaConvention::Dyson4OverKappa;

  static EnsembleSpec from_kappa(std::size_t n, double kappa,
                                 BetaConvention convention = BetaConvention::Dyson4OverKappa);
};

/// beta * sum_{j<k} ln|e^{i theta_j} - e^{i theta_k}|.
double log_density_unnormalized(const AngleConfig& config, double beta);

/// Z(beta) = int_0^{2pi} sin^beta(s/2) ds by adaptive Gauss-Kronrod.
double gap_normalization_n2(double beta);
/// 2 sqrt(pi) Gamma((beta+1)/2) / Gamma(beta/2 + 1); cross-check only.
double gap_normalization_closed_form(double beta);

/// CDF of the N=2 gap s in (0, 2pi), density sin^beta(s/2)/Z(beta). Cumulative
/// integrals at fixed knots plus one fixed-rule integral per evaluation;
/// tanh-sinh in the two end cells where the s^beta cusp sits.
class GapCdf {
 public:
  explicit GapCdf(double beta, std::size_t knots = 256);
  double operator()(double s) const;
  double density(double s) const;
  double normalization() const { return z_; }
  double beta() const { return beta_; }

 private:
  double integral(double a, double b) const;

  double beta_;
  double z_ = 0.0;
  double h_ = 0.0;
  std::vector<double> cumulative_;
};

GapCdf gap_cdf_n2(double beta);

// Matrix-ensemble reference samplers ---------------------------------------

/// Haar unitary via Ginibre + QR. Without the diagonal phase correction the
/// result is not Haar distributed; the flag exists so tests can show that.
Eigen::MatrixXcd haar_unitary(std::size_t n, std::mt19937_64& rng, bool phase_correct = true);

/// Sorted eigen-angles in [0, 2pi).
AngleConfig sample_cue(std::size_t n, std::uint64_t seed);
/// Eigen-angles of U^T U.
AngleConfig sample_coe(std::size_t n, std::uint64_t seed);
/// Eigen-angles of the self-dual U^R U for a 2n x 2n Haar U; each Kramers
/// pair reported once.
AngleConfig sample_cse(std::size_t n, std::uint64_t seed);

/// n_samples independent draws; sample i uses derive_seed(seed, i).
SampleBatch sample_matrix_ensemble(SampleSource source, std::size_t n, std::size_t n_samples,
                                   std::uint64_t seed);

// Statistics ----------------------------------------------------------------

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// c(alpha)/sqrt(n) with c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_threshold_one_sample(std::size_t n, double alpha = 0.01);
double ks_threshold_two_sample(std::size_t n, std::size_t m, double alpha = 0.01);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
};
/// Pearson chi-square of angles in [0, 2pi) against the uniform density.
ChiSquareResult chi_square_uniform(std::span<const double> angles, std::size_t bins);

/// For each row, the N circular nearest-neighbour gaps in circular order,
/// flattened row by row. Each row contributes gaps summing to 2pi.
std::vector<double> pairwise_gap_statistics(const SampleBatch& batch);

/// One gap per row: from a particle chosen uniformly at random (seeded) to
/// its counter-clockwise neighbour. Rows are independent, so the result is
/// suitable for KS tests.
std::vector<double> single_gap_per_row(const SampleBatch& batch, std::uint64_t seed);

/// Gap from particle `from` to particle `to` in each row, counter-clockwise.
std::vector<double> labeled_gaps(const SampleBatch& batch, std::size_t from, std::size_t to);

}  // namespace sledyson
