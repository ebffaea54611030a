#include "sledyson/circular_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sledyson/rng.hpp"

namespace sledyson {

double beta_for(double kappa, BetaConvention convention) {
  if (!(kappa > 0.0)) throw DomainError("beta_for: kappa must be > 0");
  switch (convention) {
    case BetaConvention::Dyson4OverKappa: return 4.0 / kappa;
    case BetaConvention::Cft2OverKappa: return 2.0 / kappa;
    case BetaConvention::Erratum8OverKappa: return 8.0 / kappa;
  }
  return 4.0 / kappa;
}

std::string to_string(BetaConvention c) {
  switch (c) {
    case BetaConvention::Dyson4OverKappa: return "DYSON_4_OVER_KAPPA";
    case BetaConvention::Cft2OverKappa: return "CFT_2_OVER_KAPPA";
    case BetaConvention::Erratum8OverKappa: return "ERRATUM_8_OVER_KAPPA";
  }
  return "UNKNOWN";
}

BetaConvention beta_convention_from_string(const std::string& s) {
  if (s == "DYSON_4_OVER_KAPPA" || s == "dyson") return BetaConvention::Dyson4OverKappa;
  if (s == "CFT_2_OVER_KAPPA" || s == "cft") return BetaConvention::Cft2OverKappa;
  if (s == "ERRATUM_8_OVER_KAPPA" || s == "erratum") return BetaConvention::Erratum8OverKappa;
  throw std::invalid_argument("unknown beta convention: " + s);
}

EnsembleSpec EnsembleSpec::from_kappa(std::size_t n, double kappa, BetaConvention convention) {
  return EnsembleSpec{n, beta_for(kappa, convention), convention};
}

double log_density_unnormalized(const AngleConfig& config, double beta) {
  double acc = 0.0;
  for (std::size_t j = 0; j < config.size(); ++j)
    for (std::size_t k = j + 1; k < config.size(); ++k) {
      const double chord = 2.0 * std::abs(std::sin(0.5 * wrap_pi(config[j] - config[k])));
      if (chord == 0.0) throw DomainError("log_density: coincident angles (-inf)");
      acc += std::log(chord);
    }
  return beta * acc;
}

namespace {

constexpr double kQuadTol = 1e-12;

double gap_weight(double s, double beta) {
  const double x = std::sin(0.5 * s);
  return x <= 0.0 ? (beta == 0.0 ? 1.0 : 0.0) : std::pow(x, beta);
}

}  // namespace

double gap_normalization_n2(double beta) {
  if (!(beta >= 0.0)) throw DomainError("gap normalization: beta must be >= 0");
  using boost::math::quadrature::gauss_kronrod;
  auto f = [beta](double s) { return gap_weight(s, beta); };
  // Split at the maximum so both endpoint cusps sit at interval ends.
  return gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, 30, kQuadTol) +
         gauss_kronrod<double, 31>::integrate(f, kPi, kTwoPi, 30, kQuadTol);
}

double gap_normalization_closed_form(double beta) {
  return 2.0 * std::sqrt(kPi) * std::tgamma(0.5 * (beta + 1.0)) / std::tgamma(0.5 * beta + 1.0);
}

GapCdf::GapCdf(double beta, std::size_t knots) : beta_(beta) {
  if (!(beta >= 0.0)) throw DomainError("gap_cdf_n2: beta must be >= 0");
  if (knots < 2) knots = 2;
  h_ = kTwoPi / static_cast<double>(knots);
  cumulative_.assign(knots + 1, 0.0);
  for (std::size_t k = 0; k < knots; ++k)
    cumulative_[k + 1] =
        cumulative_[k] + integral(h_ * static_cast<double>(k), h_ * static_cast<double>(k + 1));
  z_ = cumulative_.back();
}

double GapCdf::integral(double a, double b) const {
  if (b <= a) return 0.0;
  const double beta = beta_;
  auto f = [beta](double s) { return gap_weight(s, beta); };
  // Cells touching 0 or 2pi carry the s^beta cusp; all others are smooth.
  if (a < h_ * 0.5 || b > kTwoPi - h_ * 0.5) {
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, kQuadTol);
  }
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0);
}

double GapCdf::density(double s) const {
  if (s <= 0.0 || s >= kTwoPi) return 0.0;
  return gap_weight(s, beta_) / z_;
}

double GapCdf::operator()(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= kTwoPi) return 1.0;
  const auto k = std::min(static_cast<std::size_t>(s / h_), cumulative_.size() - 2);
  const double lo = h_ * static_cast<double>(k);
  return std::clamp((cumulative_[k] + integral(lo, s)) / z_, 0.0, 1.0);
}

GapCdf gap_cdf_n2(double beta) { return GapCdf(beta); }

// ---------------------------------------------------------------------------

Eigen::MatrixXcd haar_unitary(std::size_t n, std::mt19937_64& rng, bool phase_correct) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd z(m, m);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = std::complex<double>(s * re, s * im);
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  if (phase_correct) {
    const Eigen::MatrixXcd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < m; ++j) {
      const std::complex<double> d = r(j, j);
      const double a = std::abs(d);
      q.col(j) *= a > 0.0 ? d / a : std::complex<double>(1.0, 0.0);
    }
  }
  return q;
}

namespace {

std::vector<double> eigen_angles(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw IntegratorError("eigen-angle solve failed");
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(wrap_2pi(std::arg(es.eigenvalues()(i))));
  std::sort(a.begin(), a.end());
  return a;
}

// Collapse Kramers pairs of a sorted list of 2n angles to n angles. The pairs
// are adjacent in circular order; pick the alignment (0,1)(2,3)... or
// (1,2)...(2n-1,0) with the smaller worst pair separation.
std::vector<double> collapse_pairs(const std::vector<double>& a) {
  const std::size_t m = a.size();
  auto worst = [&](std::size_t off) {
    double w = 0.0;
    for (std::size_t p = 0; p < m / 2; ++p)
      w = std::max(w, std::abs(wrap_pi(a[(2 * p + off + 1) % m] - a[(2 * p + off) % m])));
    return w;
  };
  const std::size_t off = worst(0) <= worst(1) ? 0 : 1;
  std::vector<double> out;
  for (std::size_t p = 0; p < m / 2; ++p) {
    const double x = a[(2 * p + off) % m];
    const double y = a[(2 * p + off + 1) % m];
    out.push_back(wrap_2pi(x + 0.5 * wrap_pi(y - x)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

AngleConfig sample_cue(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_cue: n must be >= 1");
  std::mt19937_64 rng(seed);
  return AngleConfig(eigen_angles(haar_unitary(n, rng)));
}

AngleConfig sample_coe(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_coe: n must be >= 1");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXcd u = haar_unitary(n, rng);
  return AngleConfig(eigen_angles(u.transpose() * u));
}

AngleConfig sample_cse(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_cse: n must be >= 1");
  std::mt19937_64 rng(seed);
  const auto m = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXcd u = haar_unitary(2 * n, rng);
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  j.topRightCorner(m, m) = Eigen::MatrixXcd::Identity(m, m);
  j.bottomLeftCorner(m, m) = -Eigen::MatrixXcd::Identity(m, m);
  const Eigen::MatrixXcd dual = j * u.transpose() * j.transpose();
  return AngleConfig(collapse_pairs(eigen_angles(dual * u)));
}

SampleBatch sample_matrix_ensemble(SampleSource source, std::size_t n, std::size_t n_samples,
                                   std::uint64_t seed) {
  SampleMeta meta;
  meta.created_by = source;
  meta.n_particles = n;
  meta.seed = seed;
  switch (source) {
    case SampleSource::Coe: meta.beta = 1.0; break;
    case SampleSource::Cue: meta.beta = 2.0; break;
    case SampleSource::Cse: meta.beta = 4.0; break;
    case SampleSource::DysonSde:
      throw DomainError("sample_matrix_ensemble: DYSON_SDE is not a matrix ensemble");
  }
  meta.kappa = 4.0 / meta.beta;
  SampleBatch batch(meta, n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    switch (source) {
      case SampleSource::Coe: batch.set_row(i, sample_coe(n, s)); break;
      case SampleSource::Cue: batch.set_row(i, sample_cue(n, s)); break;
      case SampleSource::Cse: batch.set_row(i, sample_cse(n, s)); break;
      default: break;
    }
  }
  return batch;
}

// ---------------------------------------------------------------------------

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_threshold_one_sample(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

double ks_threshold_two_sample(std::size_t n, std::size_t m, double alpha) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) * std::sqrt((nn + mm) / (nn * mm));
}

ChiSquareResult chi_square_uniform(std::span<const double> angles, std::size_t bins) {
  if (angles.empty() || bins < 2) throw std::invalid_argument("chi_square_uniform: bad input");
  std::vector<double> counts(bins, 0.0);
  for (double a : angles) {
    auto b = static_cast<std::size_t>(wrap_2pi(a) / kTwoPi * static_cast<double>(bins));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double expected = static_cast<double>(angles.size()) / static_cast<double>(bins);
  ChiSquareResult r;
  for (double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  r.dof = bins - 1;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

std::vector<double> pairwise_gap_statistics(const SampleBatch& batch) {
  const std::size_t n = batch.cols();
  std::vector<double> gaps;
  gaps.reserve(batch.rows() * n);
  std::vector<double> s(n);
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    auto row = batch.row(r);
    std::copy(row.begin(), row.end(), s.begin());
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i + 1 < n; ++i) gaps.push_back(s[i + 1] - s[i]);
    gaps.push_back(kTwoPi - (s[n - 1] - s[0]));
  }
  return gaps;
}

namespace {

double ccw_neighbour_gap(std::span<const double> row, std::size_t j) {
  double g = kTwoPi;
  for (std::size_t k = 0; k < row.size(); ++k)
    if (k != j) g = std::min(g, ccw_distance(row[j], row[k]));
  return g;
}

}  // namespace

std::vector<double> single_gap_per_row(const SampleBatch& batch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, batch.cols() - 1);
  std::vector<double> out;
  out.reserve(batch.rows());
  for (std::size_t r = 0; r < batch.rows(); ++r) out.push_back(ccw_neighbour_gap(batch.row(r), pick(rng)));
  return out;
}

std::vector<double> labeled_gaps(const SampleBatch& batch, std::size_t from, std::size_t to) {
  if (from >= batch.cols() || to >= batch.cols()) throw std::out_of_range("labeled_gaps: index");
  std::vector<double> out;
  out.reserve(batch.rows());
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    auto row = batch.row(r);
    out.push_back(ccw_distance(row[from], row[to]));
  }
  return out;
}

}  // namespace sledyson
