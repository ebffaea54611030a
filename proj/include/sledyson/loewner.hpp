#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sledyson/angles.hpp"
#include "sledyson/dyson_process.hpp"

// N-fold radial Loewner flow
//
//   dG/dt = -G sum_j (G + e^{i theta_j(t)}) / (G - e^{i theta_j(t)}),
//
// normalized by G(0) = 0, G'(0) > 0. For N = 1 this is the usual radial
// Loewner equation with g'(0) = e^t.

namespace sledyson {

using Complex = std::complex<double>;

/// Driving angles sampled at increasing times starting at 0. Between
/// samples each angle is interpolated linearly along the shorter arc.
class DriveHistory {
 public:
  DriveHistory(std::vector<double> times, std::vector<AngleConfig> angles, double kappa,
               double dt_max);

  static DriveHistory from_trajectory(const TrajectoryRecord& record, double kappa, double dt_max);
  /// Drivers frozen at `config` on [0, t_end].
  static DriveHistory constant(const AngleConfig& config, double t_end, double dt_max = 1e-3);

  std::size_t n_drivers() const { return angles_.front().size(); }
  double duration() const { return times_.back(); }
  double kappa() const { return kappa_; }
  double dt_max() const { return dt_max_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<AngleConfig>& samples() const { return angles_; }

  /// Interpolated (unwrapped within the segment) angles at time t.
  void angles_at(double t, std::span<double> out) const;
  void drivers_at(double t, std::span<Complex> out) const;
  /// First sample time strictly after t (or duration()).
  double next_knot(double t) const;

  DriveHistory rotated(double c) const;
  DriveHistory conjugated() const;

 private:
  std::size_t segment(double t) const;

  std::vector<double> times_;
  std::vector<AngleConfig> angles_;
  double kappa_;
  double dt_max_;
};

enum class FlowStatus { Interior, Swallowed };

struct FlowPoint {
  Complex z;
  FlowStatus status = FlowStatus::Interior;
  /// Time at which the point joined the hull; meaningful when Swallowed.
  double swallow_time = 0.0;
};

struct FlowOptions {
  /// Distance to a driver below which a point counts as swallowed.
  double swallow_distance = 1e-6;
  /// Steps below this length also count as swallowing.
  double min_step = 1e-12;
  /// Step ~ step_factor * (distance to nearest driver)^2.
  double step_factor = 0.05;
};

Complex joint_rhs(Complex g, std::span<const Complex> drivers);
Complex joint_rhs(Complex g, const AngleConfig& drivers);
/// d(joint_rhs)/dg, needed for the variational equation.
Complex joint_rhs_derivative(Complex g, std::span<const Complex> drivers);

FlowPoint evolve_point(Complex z, const DriveHistory& drive, double t,
                       const FlowOptions& options = {});

struct FlowPointWithDerivative {
  FlowPoint point;
  Complex derivative;
};
FlowPointWithDerivative evolve_point_with_derivative(Complex z, const DriveHistory& drive, double t,
                                                     const FlowOptions& options = {});

/// |G_t'(0)|, from the variational equation along the fixed point z = 0.
double derivative_at_origin(const DriveHistory& drive, double t);

struct CompositionOptions {
  /// RK4 sub-steps per elementary map.
  std::size_t substeps = 64;
  /// Probes closer than this to a driver are rejected.
  double min_probe_distance = 0.05;
};

/// Compare one step of the joint flow (drivers moved by one Euler step of
/// the Dyson SDE) with the composition of N single radial SLE steps, each
/// with its own Brownian increment, followed by the undoing global rotation
/// by sqrt(kappa) * sum_j dB_j. `noise` holds the N standard-normal draws,
/// dB_j = sqrt(dt) * noise_j. Returns the worst probe discrepancy.
double composition_defect(const AngleConfig& config, double kappa, double dt,
                          std::span<const Complex> probes, std::span<const double> noise,
                          const CompositionOptions& options = {});

struct CompositionScaling {
  std::vector<double> dts;
  std::vector<double> defects;
  double slope = 0.0;
};
CompositionScaling composition_scaling(const AngleConfig& config, double kappa,
                                       std::span<const double> dts, std::span<const Complex> probes,
                                       std::span<const double> noise,
                                       const CompositionOptions& options = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct TracePoint {
  double t = 0.0;
  Complex z;
  bool resolved = true;
};

/// Points on curve j at the given times, G_t^{-1}(e^{i theta_j(t)}), obtained
/// by running the flow backwards from each time to 0.
std::vector<TracePoint> trace_points(const DriveHistory& drive, std::size_t j,
                                     std::span<const double> sample_times,
                                     const FlowOptions& options = {});

/// True when no two non-adjacent segments of the polyline cross.
bool polyline_is_simple(std::span<const Complex> pts);

}  // namespace sledyson
