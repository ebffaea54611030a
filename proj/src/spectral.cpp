#include "sledyson/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sledyson/angles.hpp"
#include "sledyson/circular_ensemble.hpp"

namespace sledyson {

namespace {

constexpr std::size_t kMinIntervals = 16;

void check_grid_size(std::size_t m) {
  if (m < kMinIntervals) throw DomainError("grid needs at least 16 intervals");
}

void check_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
}

// Banded LU with partial pivoting for a general tridiagonal system
// (the LAPACK gttrf / gttrs layout: a second superdiagonal holds fill-in).
class TridiagonalLu {
 public:
  TridiagonalLu(std::vector<double> dl, std::vector<double> d, std::vector<double> du)
      : dl_(std::move(dl)), d_(std::move(d)), du_(std::move(du)) {
    const std::size_t n = d_.size();
    du2_.assign(n, 0.0);
    pivot_.assign(n, false);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(d_[i]));
    const double tiny = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = tiny;
        const double f = dl_[i] / d_[i];
        dl_[i] = f;
        d_[i + 1] -= f * du_[i];
      } else {
        pivot_[i] = true;
        const double f = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = f;
        const double t = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = t - f * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -f * du_[i + 1];
        }
      }
    }
    if (n > 0 && d_[n - 1] == 0.0) d_[n - 1] = tiny;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (pivot_[i]) {
        const double t = b[i];
        b[i] = b[i + 1];
        b[i + 1] = t - dl_[i] * b[i + 1];
      } else {
        b[i + 1] -= dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t k = n - 2; k-- > 0;) {
      b[k] = (b[k] - du_[k] * b[k + 1] - du2_[k] * b[k + 2]) / d_[k];
    }
  }

 private:
  std::vector<double> dl_;  // dl_[i] couples row i+1 to column i
  std::vector<double> d_;
  std::vector<double> du_;
  std::vector<double> du2_;
  std::vector<bool> pivot_;
};

// Active block of the decay operator T: -A for a generator, H for a
// hamiltonian. dl[i] = T(i+1, i), du[i] = T(i, i+1).
struct Block {
  std::size_t offset = 0;
  std::vector<double> dl, d, du;
};

Block decay_block(const GridOperator& op) {
  const double s = op.kind == OperatorKind::Generator ? -1.0 : 1.0;
  Block b;
  b.offset = op.first_active();
  const std::size_t last = op.last_active();
  const std::size_t n = last - b.offset + 1;
  b.d.resize(n);
  b.dl.assign(n, 0.0);
  b.du.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = b.offset + k;
    b.d[k] = s * op.diag[i];
    if (k + 1 < n) {
      b.du[k] = s * op.upper[i];
      b.dl[k] = s * op.lower[i + 1];
    }
  }
  return b;
}

// Number of eigenvalues below x of the symmetric tridiagonal with diagonal d
// and squared off-diagonals e2.
std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e2, double x) {
  std::size_t count = 0;
  double q = 1.0;
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = d[i] - x - (i > 0 ? e2[i - 1] / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (0-based) of the symmetrized block.
double kth_eigenvalue(const Block& b, std::size_t k) {
  const std::size_t n = b.d.size();
  if (k >= n) throw std::invalid_argument("eigenvalue index out of range");
  std::vector<double> e2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    e2[i] = b.dl[i] * b.du[i];
    if (!(e2[i] > 0.0)) {
      if (e2[i] == 0.0) continue;
      throw std::runtime_error("operator is not symmetrizable");
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::sqrt(e2[i - 1]) : 0.0) + (i + 1 < n ? std::sqrt(e2[i]) : 0.0);
    lo = std::min(lo, b.d[i] - r);
    hi = std::max(hi, b.d[i] + r);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(b.d, e2, mid) > k) hi = mid; else lo = mid;
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> inverse_iteration(const Block& b, double sigma) {
  const std::size_t n = b.d.size();
  std::vector<double> d(b.d);
  for (double& v : d) v -= sigma;
  const TridiagonalLu lu(b.dl, d, b.du);
  std::vector<double> x(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) x[i] += 1e-3 * std::sin(0.37 * static_cast<double>(i));
  std::vector<double> prev;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    lu.solve(x);
    double norm = 0.0;
    for (double v : x) norm = std::max(norm, std::abs(v));
    if (!(norm > 0.0) || !std::isfinite(norm)) throw std::runtime_error("inverse iteration failed");
    for (double& v : x) v /= norm;
    if (!prev.empty()) {
      double diff = 0.0, diff_flip = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        diff = std::max(diff, std::abs(x[i] - prev[i]));
        diff_flip = std::max(diff_flip, std::abs(x[i] + prev[i]));
      }
      // Round-off floor of the near-singular solve is ~1e-13.
      if (std::min(diff, diff_flip) < 1e-10) converged = true; else if (converged) break;
      if (converged && it >= 3) return x;
    }
    prev = x;
  }
  throw std::runtime_error("inverse iteration did not converge");
}

void normalize_max(std::vector<double>& f) {
  std::size_t imax = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > std::abs(f[imax])) imax = i;
  }
  const double s = f[imax];
  if (s == 0.0) throw std::runtime_error("zero eigenfunction");
  for (double& v : f) v /= s;
}

// cot(x/2) - 2/x, accurate near 0.
double cot_minus_pole(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return -x / 6.0 - x * x2 / 360.0 - x * x2 * x2 / 15120.0;
  }
  return 1.0 / std::tan(0.5 * x) - 2.0 / x;
}

// -<u, A u>_m / <u, u>_m with m the symmetrizing masses, as
// sum_f s_f (u_{i+1} - u_i)^2 - sum_i m_i r_i u_i^2: no large terms cancel.
double energy_rayleigh(const GridOperator& op, const std::vector<double>& u) {
  const std::size_t first = op.first_active();
  const std::size_t last = op.last_active();
  double m = 1.0;
  double energy = 0.0, norm = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    energy -= m * op.row_sum[i] * u[i] * u[i];
    norm += m * u[i] * u[i];
    if (i < last) {
      const double s = m * op.upper[i];
      const double du = u[i + 1] - u[i];
      energy += s * du * du;
      m *= op.upper[i] / op.lower[i + 1];
    }
  }
  return energy / norm;
}

}  // namespace

double time_factor(TimeConvention c) { return c == TimeConvention::Dyson ? 2.0 : 1.0; }

std::string to_string(TimeConvention c) { return c == TimeConvention::Dyson ? "DYSON" : "LSW_HALF"; }

TimeConvention time_convention_from_string(const std::string& s) {
  if (s == "DYSON" || s == "dyson") return TimeConvention::Dyson;
  if (s == "LSW_HALF" || s == "lsw_half" || s == "lsw") return TimeConvention::LswHalf;
  throw std::invalid_argument("unknown time convention: " + s);
}

Grid Grid::closed(std::size_t m) {
  check_grid_size(m);
  return Grid{0.0, kTwoPi, m};
}

Grid Grid::interior(std::size_t m) {
  check_grid_size(m);
  const double h = kTwoPi / static_cast<double>(m);
  return Grid{h, kTwoPi - h, m - 2};
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
  return out;
}

std::vector<double> GridOperator::apply(std::span<const double> u) const {
  const std::size_t n = size();
  if (u.size() != n) throw std::invalid_argument("size mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * u[i];
    if (i > 0) v += lower[i] * u[i - 1];
    if (i + 1 < n) v += upper[i] * u[i + 1];
    out[i] = v;
  }
  return out;
}

std::vector<double> GridOperator::apply_transpose(std::span<const double> u) const {
  const std::size_t n = size();
  if (u.size() != n) throw std::invalid_argument("size mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * u[i];
    if (i > 0) v += upper[i - 1] * u[i - 1];
    if (i + 1 < n) v += lower[i + 1] * u[i + 1];
    out[i] = v;
  }
  return out;
}

std::vector<double> GridOperator::to_function(std::span<const double> u) const {
  std::vector<double> f(u.begin(), u.end());
  if (!factor.empty()) {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= factor[i];
  }
  return f;
}

std::vector<double> GridOperator::to_reduced(std::span<const double> f) const {
  std::vector<double> u(f.begin(), f.end());
  if (factor.empty()) return u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (factor[i] != 0.0) u[i] /= factor[i];
  }
  // A vanishing factor marks the singular endpoint; extend from the neighbour.
  if (u.size() > 1 && factor.front() == 0.0) u.front() = u[1];
  return u;
}

Eigen::MatrixXd GridOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i > 0) m(i, i - 1) = lower[i];
    if (i + 1 < n) m(i, i + 1) = upper[i];
  }
  return m;
}

GridOperator GridOperator::scaled(double s) const {
  GridOperator out = *this;
  for (double& v : out.lower) v *= s;
  for (double& v : out.diag) v *= s;
  for (double& v : out.upper) v *= s;
  return out;
}

double one_arm_exponent_alpha(double kappa) {
  check_kappa(kappa);
  return 1.0 - 4.0 / kappa;
}

double frobenius_factor(double theta, double a) {
  if (a == 0.0) return 1.0;
  return std::pow(theta, a) * std::exp(-a * theta * theta / (8.0 * kPi * kPi));
}

double reduced_potential(double theta, double a, double kappa) {
  if (a == 0.0) return 0.0;
  const double beta = 4.0 / kappa;
  const double k = 1.0 / (4.0 * kPi * kPi);
  if (theta <= 0.0) return -a * (2.0 + a) * k - a * beta / 12.0;
  if (theta >= kTwoPi) return -a * (1.0 + beta) / (2.0 * kPi * kPi);
  // The 1/theta^2 terms cancel on the branch a = 1 - beta.
  const double psi = a * (4.0 * kPi * kPi - theta * theta) * k / theta;
  return -a * k * (1.0 + 2.0 * a + beta) + a * a * k * k * theta * theta +
         0.5 * beta * cot_minus_pole(theta) * psi;
}

GridOperator build_adjoint_n2(double kappa, std::size_t m, TimeConvention convention,
                              FrobeniusBranch branch) {
  check_kappa(kappa);
  const Grid grid = Grid::closed(m);
  const double beta = 4.0 / kappa;
  double a = 0.0;
  if (branch == FrobeniusBranch::Vanishing) {
    if (kappa <= 4.0) {
      throw DomainError("the vanishing branch needs kappa > 4; for kappa <= 4 the branch is the constant");
    }
    a = one_arm_exponent_alpha(kappa);
  }
  const double c = time_factor(convention) * 0.5 * kappa;
  const double h = grid.spacing();
  const std::size_t n = grid.size();
  auto weight = [&](double theta) {
    const double phi = frobenius_factor(theta, a);
    return std::pow(std::sin(0.5 * theta), beta) * phi * phi;
  };

  GridOperator op;
  op.grid = grid;
  op.kind = OperatorKind::Generator;
  op.left = Boundary{BoundaryKind::RegularSingular, a};
  op.right = Boundary{BoundaryKind::Neumann, 0.0};
  op.lower.assign(n, 0.0);
  op.diag.assign(n, 0.0);
  op.upper.assign(n, 0.0);
  if (a != 0.0) {
    op.factor.resize(n);
    for (std::size_t i = 0; i < n; ++i) op.factor[i] = frobenius_factor(grid.node(i), a);
  }

  std::vector<double> face(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) face[i] = weight(grid.node(i) + 0.5 * h);

  // End cells integrate the weight exactly for its leading power law:
  // theta^{beta + 2a} at 0 and (2pi - theta)^beta at 2pi.
  const double p_left = beta + 2.0 * a;
  op.upper[0] = 2.0 * c * (1.0 + p_left) / (h * h);
  op.row_sum.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) op.row_sum[i] = c * reduced_potential(grid.node(i), a, kappa);
  op.row_sum[n - 1] = c * reduced_potential(kTwoPi, a, kappa);
  op.diag[0] = -op.upper[0] + op.row_sum[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // Cell mass int W over [theta_i - h/2, theta_i + h/2]; the midpoint value
    // h W(theta_i) would cost accuracy next to the (2pi - theta)^beta end.
    const double mass = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        weight, grid.node(i) - 0.5 * h, grid.node(i) + 0.5 * h, 0);
    op.lower[i] = c * face[i - 1] / (h * mass);
    op.upper[i] = c * face[i] / (h * mass);
    op.diag[i] = -op.lower[i] - op.upper[i] + op.row_sum[i];
  }
  op.lower[n - 1] = 2.0 * c * (1.0 + beta) / (h * h);
  op.diag[n - 1] = -op.lower[n - 1] + op.row_sum[n - 1];
  return op;
}

namespace {

// Square-root-approximation rates (kappa / h^2) exp(+-h b / (2 kappa)) for the
// relative coordinate with drift b = 2 cot(theta/2), evaluated at the face
// between nodes i and i+1.
double face_exponent(double theta_face, double kappa, double h) {
  return h * (2.0 / std::tan(0.5 * theta_face)) / (2.0 * kappa);
}

}  // namespace

GridOperator build_fp_generator_n2(double kappa, std::size_t m, TimeConvention convention) {
  check_kappa(kappa);
  const Grid grid = Grid::interior(m);
  const double h = grid.spacing();
  const std::size_t n = grid.size();
  const double c = 0.5 * time_factor(convention) * kappa / (h * h);

  GridOperator op;
  op.grid = grid;
  op.kind = OperatorKind::Generator;
  op.left = Boundary{BoundaryKind::Neumann, 0.0};
  op.right = Boundary{BoundaryKind::Neumann, 0.0};
  op.lower.assign(n, 0.0);
  op.diag.assign(n, 0.0);
  op.upper.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double e = face_exponent(grid.node(i) + 0.5 * h, kappa, h);
    const double right = c * std::exp(e);   // i -> i+1
    const double left = c * std::exp(-e);   // i+1 -> i
    op.upper[i] = left;
    op.lower[i + 1] = right;
    op.diag[i] -= right;
    op.diag[i + 1] -= left;
  }
  return op;
}

std::vector<double> discrete_equilibrium(const GridOperator& fp, double kappa,
                                         TimeConvention /*convention*/) {
  const std::size_t n = fp.size();
  const double h = fp.grid.spacing();
  std::vector<double> logp(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    logp[i + 1] = logp[i] + 2.0 * face_exponent(fp.grid.node(i) + 0.5 * h, kappa, h);
  }
  const double top = *std::max_element(logp.begin(), logp.end());
  std::vector<double> p(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp(logp[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> equilibrium_density_n2(double kappa, const Grid& grid) {
  check_kappa(kappa);
  std::vector<double> p(grid.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::pow(std::abs(std::sin(0.5 * grid.node(i))), 4.0 / kappa);
  }
  return p;
}

GridOperator build_cs_hamiltonian_n2(double kappa, std::size_t m, TimeConvention convention) {
  GridOperator op = build_fp_generator_n2(kappa, m, convention);
  const std::size_t n = op.size();
  const double h = op.grid.spacing();
  // Pi_{i+1}/Pi_i = exp(2e_i), so sqrt(Pi_{i+1}/Pi_i) = exp(e_i) exactly
  // cancels the rate asymmetry.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double e = face_exponent(op.grid.node(i) + 0.5 * h, kappa, h);
    const double up = -op.upper[i] * std::exp(e);
    const double lo = -op.lower[i + 1] * std::exp(-e);
    const double sym = 0.5 * (up + lo);
    op.upper[i] = sym;
    op.lower[i + 1] = sym;
  }
  for (double& v : op.diag) v = -v;
  op.kind = OperatorKind::Hamiltonian;
  return op;
}

double cs_potential_n2(double theta, double kappa, TimeConvention convention) {
  check_kappa(kappa);
  const double s = std::sin(0.5 * theta);
  const double u = (2.0 - kappa) / (2.0 * kappa * s * s) - 1.0 / kappa;
  return 0.5 * time_factor(convention) * u;
}

double symmetry_defect(const GridOperator& op) {
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < op.size(); ++i) {
    d = std::max(d, std::abs(op.upper[i] - op.lower[i + 1]));
  }
  return d;
}

double duality_defect(double kappa, std::size_t m) {
  const GridOperator fp = build_fp_generator_n2(kappa, m, TimeConvention::Dyson);
  const GridOperator adj = build_adjoint_n2(kappa, m, TimeConvention::Dyson, FrobeniusBranch::Constant);
  auto bump = [](double theta, double center, double width) {
    const double x = (theta - center) / width;
    return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
  };
  const std::size_t n = fp.size();
  std::vector<double> f(n), g_full(adj.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) f[i] = bump(fp.grid.node(i), 2.5, 1.2);
  for (std::size_t i = 0; i < adj.size(); ++i) g_full[i] = bump(adj.grid.node(i), 3.5, 1.4);
  const std::vector<double> lf = fp.apply(f);
  const std::vector<double> lg_full = adj.apply(g_full);
  const double h = fp.grid.spacing();
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lhs += lf[i] * g_full[i + 1];
    rhs += f[i] * lg_full[i + 1];
  }
  return std::abs(lhs - rhs) * h;
}

GridOperator build_laplacian(const Grid& grid, Boundary left, Boundary right) {
  if (grid.intervals < kMinIntervals) throw DomainError("grid needs at least 16 intervals");
  for (const Boundary& b : {left, right}) {
    if (b.kind == BoundaryKind::RegularSingular) {
      throw std::invalid_argument("laplacian supports Dirichlet or Neumann ends");
    }
  }
  const std::size_t n = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  GridOperator op;
  op.grid = grid;
  op.kind = OperatorKind::Generator;
  op.left = left;
  op.right = right;
  op.lower.assign(n, 1.0 / h2);
  op.upper.assign(n, 1.0 / h2);
  op.diag.assign(n, -2.0 / h2);
  op.lower[0] = 0.0;
  op.upper[n - 1] = 0.0;
  // Ghost-point reflection for zero derivative.
  if (left.kind == BoundaryKind::Neumann) op.upper[0] = 2.0 / h2;
  if (right.kind == BoundaryKind::Neumann) op.lower[n - 1] = 2.0 / h2;
  return op;
}

Eigenpair lowest_eigenpair(const GridOperator& op) {
  const Block b = decay_block(op);
  const double lambda = kth_eigenvalue(b, 0);
  double scale = 0.0;
  for (double v : b.d) scale = std::max(scale, std::abs(v));
  const double sigma = lambda - 1e-12 * std::max(scale, 1.0);
  const std::vector<double> v = inverse_iteration(b, sigma);
  std::vector<double> u(op.size(), 0.0);
  std::copy(v.begin(), v.end(), u.begin() + static_cast<std::ptrdiff_t>(b.offset));
  Eigenpair out;
  out.value = lambda;
  if (op.kind == OperatorKind::Generator && !op.row_sum.empty()) out.value = energy_rayleigh(op, u);
  out.function = op.kind == OperatorKind::Generator ? op.to_function(u) : u;
  normalize_max(out.function);
  return out;
}

std::vector<double> lowest_decay_rates(const GridOperator& op, std::size_t k) {
  const Block b = decay_block(op);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = kth_eigenvalue(b, i);
  return out;
}

double fp_relaxation_rate(const GridOperator& fp) {
  const std::size_t n = fp.size();
  // Shift below the spectrum of -L; the kernel dominates the first pass.
  const double shift = 0.05;
  std::vector<double> dl(n - 1), d(n), du(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = -fp.diag[i] + shift;
    if (i + 1 < n) {
      du[i] = -fp.upper[i];
      dl[i] = -fp.lower[i + 1];
    }
  }
  dl.push_back(0.0);
  du.push_back(0.0);
  const TridiagonalLu lu(dl, d, du);

  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    s = std::sqrt(s);
    for (double& v : x) v /= s;
  };

  std::vector<double> r0(n, 1.0);
  for (int it = 0; it < 30; ++it) {
    lu.solve(r0);
    normalize(r0);
  }
  const double mass0 = std::accumulate(r0.begin(), r0.end(), 0.0);

  std::vector<double> x(n);
  // Generic start: the slowest mode is odd about pi, the next one even.
  for (std::size_t i = 0; i < n; ++i) {
    const double t = fp.grid.node(i);
    x[i] = (t - kPi) + 0.3 * std::cos(t);
  }
  double mu = 0.0;
  for (int it = 0; it < 2000; ++it) {
    lu.solve(x);
    const double mass = std::accumulate(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] -= mass / mass0 * r0[i];
    normalize(x);
    const std::vector<double> lx = fp.apply(x);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num -= x[i] * lx[i];
    if (it > 5 && std::abs(num - mu) <= 1e-13 * std::abs(num)) return num;
    mu = num;
  }
  throw std::runtime_error("relaxation-rate iteration did not converge");
}

double one_arm_lambda_exact(double kappa, TimeConvention convention) {
  check_kappa(kappa);
  return time_factor(convention) * (kappa * kappa - 16.0) / (32.0 * kappa);
}

double overlap(const Grid& grid, std::span<const double> f, std::span<const double> g) {
  const std::size_t n = grid.size();
  if (f.size() != n || g.size() != n) throw std::invalid_argument("size mismatch");
  double fg = 0.0, ff = 0.0, gg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    fg += w * f[i] * g[i];
    ff += w * f[i] * f[i];
    gg += w * g[i] * g[i];
  }
  return fg / std::sqrt(ff * gg);
}

double stationarity_residual(double kappa, std::size_t m, double lo, double hi) {
  const GridOperator fp = build_fp_generator_n2(kappa, m, TimeConvention::Dyson);
  std::vector<double> p = equilibrium_density_n2(kappa, fp.grid);
  const double z = gap_normalization_n2(4.0 / kappa);
  for (double& v : p) v /= z;
  const std::vector<double> r = fp.apply(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double theta = fp.grid.node(i);
    if (theta >= lo && theta <= hi) worst = std::max(worst, std::abs(r[i]));
  }
  return worst;
}

std::vector<double> survival_probability(double kappa, double theta0, std::span<const double> times,
                                         const SurvivalOptions& options) {
  check_kappa(kappa);
  if (!(theta0 > 0.0 && theta0 < kTwoPi)) throw DomainError("theta0 must lie in (0, 2pi)");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1])) {
      throw std::invalid_argument("times must be nonnegative and ascending");
    }
  }
  std::vector<double> out(times.size(), 1.0);
  if (kappa <= 4.0) return out;
  if (!(options.dt > 0.0)) throw std::invalid_argument("dt must be positive");

  const GridOperator op = build_adjoint_n2(kappa, options.m, options.convention, FrobeniusBranch::Vanishing);
  const std::size_t n = op.size();
  std::vector<double> u(n);
  for (std::size_t i = 1; i < n; ++i) u[i] = 1.0 / op.factor[i];
  u[0] = u[1];

  auto factor_step = [&](double dt) {
    std::vector<double> dl(n, 0.0), d(n), du(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = 1.0 - dt * op.diag[i];
      if (i + 1 < n) {
        du[i] = -dt * op.upper[i];
        dl[i] = -dt * op.lower[i + 1];
      }
    }
    return TridiagonalLu(dl, d, du);
  };
  const TridiagonalLu step = factor_step(options.dt);

  const double h = op.grid.spacing();
  const auto cell = std::min(static_cast<std::size_t>(theta0 / h), n - 2);
  const double frac = (theta0 - op.grid.node(cell)) / h;
  const double phi0 = frobenius_factor(theta0, op.left.exponent);

  double t = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] == 0.0) continue;
    const double target = times[k];
    const double tol = 1e-9 * options.dt;
    while (t + options.dt <= target + tol) {
      step.solve(u);
      t += options.dt;
    }
    if (target - t > tol) {
      factor_step(target - t).solve(u);
      t = target;
    }
    out[k] = phi0 * ((1.0 - frac) * u[cell] + frac * u[cell + 1]);
  }
  return out;
}

double survival_probability(double kappa, double theta0, double t, const SurvivalOptions& options) {
  const double times[] = {t};
  return survival_probability(kappa, theta0, times, options).front();
}

double survival_decay_rate(double kappa, double theta0, double t_lo, double t_hi,
                           const SurvivalOptions& options) {
  if (!(t_hi > t_lo && t_lo >= 0.0)) throw std::invalid_argument("bad fit window");
  const auto k = static_cast<std::size_t>(std::llround((t_hi - t_lo) / options.dt));
  std::vector<double> times(k + 1);
  for (std::size_t i = 0; i <= k; ++i) times[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(k);
  const std::vector<double> h = survival_probability(kappa, theta0, times, options);
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    if (!(h[i] > 0.0)) throw std::runtime_error("survival probability is not positive");
    const double y = std::log(h[i]);
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
  }
  const double nn = static_cast<double>(k + 1);
  const double slope = (nn * sty - st * sy) / (nn * stt - st * st);
  return -slope;
}

}  // namespace sledyson
