#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Reduced two-particle operators in the relative coordinate theta in (0, 2pi):
//
//   adjoint generator  L^dag h = c [ (kappa/2) h'' + cot(theta/2) h' ]
//   Fokker-Planck      L P     = c [ (kappa/2) P'' - (cot(theta/2) P)' ]
//   Calogero-Sutherland H      = -P_eq^{-1/2} L P_eq^{1/2}
//
// with c = 1 in the LSW_HALF clock and c = 2 in the Dyson clock.

namespace sledyson {

enum class TimeConvention { Dyson, LswHalf };
/// 2 for Dyson, 1 for LswHalf.
double time_factor(TimeConvention c);
std::string to_string(TimeConvention c);
TimeConvention time_convention_from_string(const std::string& s);

enum class BoundaryKind { Dirichlet, Neumann, RegularSingular };

struct Boundary {
  BoundaryKind kind = BoundaryKind::Neumann;
  /// Frobenius exponent of the selected branch (RegularSingular only).
  double exponent = 0.0;
};

/// M + 1 uniformly spaced nodes on [theta_min, theta_max].
struct Grid {
  double theta_min = 0.0;
  double theta_max = 0.0;
  std::size_t intervals = 0;

  static Grid closed(std::size_t m);    // [0, 2pi]
  static Grid interior(std::size_t m);  // nodes k * 2pi/m, k = 1..m-1
  std::size_t size() const { return intervals + 1; }
  double spacing() const { return (theta_max - theta_min) / static_cast<double>(intervals); }
  double node(std::size_t i) const { return theta_min + spacing() * static_cast<double>(i); }
  std::vector<double> nodes() const;
};

enum class OperatorKind { Generator, Hamiltonian };

/// Tridiagonal discretization of a 1-D operator. When `factor` is nonempty
/// the matrix acts on reduced values u = f / factor, where the factor
/// carries the Frobenius behaviour at a regular-singular endpoint.
/// Dirichlet rows are excluded from the active block.
struct GridOperator {
  Grid grid;
  std::vector<double> lower;  // lower[i] = A(i, i-1), lower[0] unused
  std::vector<double> diag;
  std::vector<double> upper;  // upper[i] = A(i, i+1), upper[n-1] unused
  Boundary left;
  Boundary right;
  OperatorKind kind = OperatorKind::Generator;
  std::vector<double> factor;
  /// Row sums A(i,i-1) + A(i,i) + A(i,i+1) held exactly, when known; lets the
  /// eigenvalue be evaluated from the energy form without cancellation.
  std::vector<double> row_sum;

  std::size_t size() const { return diag.size(); }
  std::size_t first_active() const { return left.kind == BoundaryKind::Dirichlet ? 1 : 0; }
  std::size_t last_active() const {
    return right.kind == BoundaryKind::Dirichlet ? size() - 2 : size() - 1;
  }
  std::vector<double> apply(std::span<const double> u) const;
  std::vector<double> apply_transpose(std::span<const double> u) const;
  /// Reduced values -> function values.
  std::vector<double> to_function(std::span<const double> u) const;
  std::vector<double> to_reduced(std::span<const double> f) const;
  Eigen::MatrixXd dense() const;
  GridOperator scaled(double s) const;
};

/// Frobenius branch at theta = 0 for the adjoint generator: exponent 0
/// (h regular, reflecting) or 1 - 4/kappa (h vanishing, absorbing; kappa > 4).
enum class FrobeniusBranch { Constant, Vanishing };

double one_arm_exponent_alpha(double kappa);

/// L^dag on [0, 2pi], zero-flux (Neumann) at 2pi, the chosen branch at 0.
GridOperator build_adjoint_n2(double kappa, std::size_t m, TimeConvention convention,
                              FrobeniusBranch branch = FrobeniusBranch::Vanishing);

/// Frobenius factor used by build_adjoint_n2 for exponent a:
/// theta^a exp(-a theta^2 / (8 pi^2)); its log-derivative vanishes at 2pi.
double frobenius_factor(double theta, double a);
/// The zeroth-order coefficient q = (1/w)(w phi')'/phi of the reduced
/// operator, w = sin^{4/kappa}(theta/2), phi = frobenius_factor; finite on [0, 2pi].
double reduced_potential(double theta, double a, double kappa);

/// Fokker-Planck generator on the interior nodes of a uniform partition of
/// [0, 2pi] into m intervals, drift 2 cot(theta/2) (Dyson clock). Uses the
/// square-root detailed-balance scheme; zero flux past the end nodes.
GridOperator build_fp_generator_n2(double kappa, std::size_t m,
                                   TimeConvention convention = TimeConvention::Dyson);

/// Discrete equilibrium of build_fp_generator_n2, normalized to sum 1.
std::vector<double> discrete_equilibrium(const GridOperator& fp, double kappa,
                                         TimeConvention convention = TimeConvention::Dyson);

/// sin^{4/kappa}(theta/2) at the grid nodes (unnormalized).
std::vector<double> equilibrium_density_n2(double kappa, const Grid& grid);

/// Reduced Calogero-Sutherland operator, -Pi^{-1/2} L Pi^{1/2} with Pi the
/// discrete equilibrium of the Fokker-Planck generator on the same grid.
GridOperator build_cs_hamiltonian_n2(double kappa, std::size_t m,
                                     TimeConvention convention = TimeConvention::Dyson);

/// (2 - kappa)/(2 kappa sin^2(theta/2)) - 1/kappa, times the time factor,
/// the continuum potential of the reduced hamiltonian.
double cs_potential_n2(double theta, double kappa, TimeConvention convention = TimeConvention::Dyson);

/// max_i |A(i, i+1) - A(i+1, i)|.
double symmetry_defect(const GridOperator& op);

/// |<L f, g> - <f, L^dag g>| for two fixed smooth bumps supported inside
/// (0, 2pi), with L the Fokker-Planck generator and L^dag the adjoint built
/// on the same nodes (Dyson clock).
double duality_defect(double kappa, std::size_t m);

/// Pure second derivative with the given boundary rows (Neumann or Dirichlet).
GridOperator build_laplacian(const Grid& grid, Boundary left, Boundary right);

struct Eigenpair {
  double value = 0.0;
  std::vector<double> function;  // function values, max-norm 1, positive at the max
};

/// Smallest decay rate (smallest eigenvalue of -A for a generator, of H for
/// a hamiltonian) and its eigenfunction. Requires a symmetrizable
/// tridiagonal (off-diagonal products positive).
Eigenpair lowest_eigenpair(const GridOperator& op);
/// The k smallest decay rates, ascending.
std::vector<double> lowest_decay_rates(const GridOperator& op, std::size_t k);

/// Slowest nonzero decay rate of a Fokker-Planck generator on mean-zero
/// densities, by deflated inverse iteration on the generator itself.
double fp_relaxation_rate(const GridOperator& fp);

/// (kappa^2 - 16)/(32 kappa) in the LswHalf clock, doubled in the Dyson clock.
double one_arm_lambda_exact(double kappa, TimeConvention convention = TimeConvention::LswHalf);

/// Normalized inner product under trapezoid weights on the grid.
double overlap(const Grid& grid, std::span<const double> f, std::span<const double> g);

/// ||A P_eq||_inf over nodes with theta in [lo, hi]; the residual of the
/// Fokker-Planck generator on the exact equilibrium density.
double stationarity_residual(double kappa, std::size_t m, double lo, double hi);

struct SurvivalOptions {
  std::size_t m = 1024;
  double dt = 1e-2;
  TimeConvention convention = TimeConvention::LswHalf;
};

/// h(theta0, t) for each t (ascending), solving dh/dt = L^dag h from h = 1
/// with absorption at theta = 0 and zero flux at 2pi. kappa <= 4: identically 1.
std::vector<double> survival_probability(double kappa, double theta0, std::span<const double> times,
                                         const SurvivalOptions& options = {});
double survival_probability(double kappa, double theta0, double t, const SurvivalOptions& options = {});

/// Least-squares decay rate of log h on [t_lo, t_hi].
double survival_decay_rate(double kappa, double theta0, double t_lo, double t_hi,
                           const SurvivalOptions& options = {});

}  // namespace sledyson
