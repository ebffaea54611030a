#include "sledyson/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sledyson {

DriveHistory::DriveHistory(std::vector<double> times, std::vector<AngleConfig> angles, double kappa,
                           double dt_max)
    : times_(std::move(times)), angles_(std::move(angles)), kappa_(kappa), dt_max_(dt_max) {
  if (times_.empty() || times_.size() != angles_.size())
    throw DomainError("DriveHistory: times and angles must be nonempty and aligned");
  if (times_.front() != 0.0) throw DomainError("DriveHistory: times must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw DomainError("DriveHistory: times must increase");
    if (angles_[i].size() != angles_[0].size())
      throw DomainError("DriveHistory: driver count changes");
  }
  if (!(dt_max_ > 0.0)) throw DomainError("DriveHistory: dt_max must be > 0");
}

DriveHistory DriveHistory::from_trajectory(const TrajectoryRecord& record, double kappa,
                                           double dt_max) {
  return DriveHistory(record.times, record.states, kappa, dt_max);
}

DriveHistory DriveHistory::constant(const AngleConfig& config, double t_end, double dt_max) {
  if (!(t_end > 0.0)) throw DomainError("DriveHistory::constant: t_end must be > 0");
  return DriveHistory({0.0, t_end}, {config, config}, 0.0, dt_max);
}

std::size_t DriveHistory::segment(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(it - times_.begin()) - 1,
                               times_.size() >= 2 ? times_.size() - 2 : 0);
}

void DriveHistory::angles_at(double t, std::span<double> out) const {
  const std::size_t n = n_drivers();
  if (times_.size() == 1) {
    for (std::size_t j = 0; j < n; ++j) out[j] = angles_[0][j];
    return;
  }
  const std::size_t k = segment(t);
  const double t0 = times_[k], t1 = times_[k + 1];
  const double s = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = angles_[k][j];
    out[j] = a + s * wrap_pi(angles_[k + 1][j] - a);
  }
}

void DriveHistory::drivers_at(double t, std::span<Complex> out) const {
  const std::size_t n = n_drivers();
  double buf[16];
  std::vector<double> heap;
  double* a = buf;
  if (n > 16) {
    heap.resize(n);
    a = heap.data();
  }
  angles_at(t, std::span<double>(a, n));
  for (std::size_t j = 0; j < n; ++j) out[j] = std::polar(1.0, a[j]);
}

double DriveHistory::next_knot(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return it == times_.end() ? times_.back() : *it;
}

DriveHistory DriveHistory::rotated(double c) const {
  std::vector<AngleConfig> a;
  a.reserve(angles_.size());
  for (const auto& x : angles_) a.push_back(x.rotated(c));
  return DriveHistory(times_, std::move(a), kappa_, dt_max_);
}

DriveHistory DriveHistory::conjugated() const {
  std::vector<AngleConfig> a;
  a.reserve(angles_.size());
  for (const auto& x : angles_) {
    std::vector<double> v = x.vector();
    for (double& y : v) y = -y;
    a.push_back(AngleConfig::wrapped(std::move(v)));
  }
  return DriveHistory(times_, std::move(a), kappa_, dt_max_);
}

// ---------------------------------------------------------------------------

Complex joint_rhs(Complex g, std::span<const Complex> drivers) {
  Complex s{0.0, 0.0};
  for (const Complex& e : drivers) {
    const Complex den = g - e;
    if (den == Complex{0.0, 0.0}) throw DomainError("joint_rhs: point on a driving singularity");
    s += (g + e) / den;
  }
  return -g * s;
}

Complex joint_rhs(Complex g, const AngleConfig& drivers) {
  std::vector<Complex> e(drivers.size());
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = std::polar(1.0, drivers[j]);
  return joint_rhs(g, e);
}

Complex joint_rhs_derivative(Complex g, std::span<const Complex> drivers) {
  Complex s{0.0, 0.0}, ds{0.0, 0.0};
  for (const Complex& e : drivers) {
    const Complex den = g - e;
    if (den == Complex{0.0, 0.0}) throw DomainError("joint_rhs: point on a driving singularity");
    s += (g + e) / den;
    ds += -2.0 * e / (den * den);
  }
  return -s - g * ds;
}

namespace {

double nearest_driver(Complex g, std::span<const Complex> e) {
  double d = std::numeric_limits<double>::infinity();
  for (const Complex& x : e) d = std::min(d, std::abs(g - x));
  return d;
}

}  // namespace

FlowPointWithDerivative evolve_point_with_derivative(Complex z, const DriveHistory& drive,
                                                     double t_end, const FlowOptions& options) {
  if (t_end < 0.0 || t_end > drive.duration() * (1.0 + 1e-12))
    throw DomainError("evolve_point: time outside the drive history");
  if (std::abs(z) > 1.0 + 1e-12) throw DomainError("evolve_point: |z| > 1");
  t_end = std::min(t_end, drive.duration());

  const std::size_t n = drive.n_drivers();
  std::vector<Complex> e0(n), e1(n), e2(n);
  Complex g = z, dg{1.0, 0.0};
  double t = 0.0;
  for (;;) {
    drive.drivers_at(t, e0);
    const double d = nearest_driver(g, e0);
    if (d < options.swallow_distance) return {{g, FlowStatus::Swallowed, t}, dg};
    if (t >= t_end) break;
    double te = std::min({t + drive.dt_max(), drive.next_knot(t), t_end});
    const double limit = options.step_factor * d * d;
    if (limit < options.min_step) return {{g, FlowStatus::Swallowed, t}, dg};
    if (te - t > limit) te = t + limit;
    const double h = te - t;
    drive.drivers_at(t + 0.5 * h, e1);
    drive.drivers_at(te, e2);

    const Complex k1 = joint_rhs(g, e0);
    const Complex l1 = joint_rhs_derivative(g, e0) * dg;
    const Complex g2 = g + 0.5 * h * k1, d2 = dg + 0.5 * h * l1;
    const Complex k2 = joint_rhs(g2, e1);
    const Complex l2 = joint_rhs_derivative(g2, e1) * d2;
    const Complex g3 = g + 0.5 * h * k2, d3 = dg + 0.5 * h * l2;
    const Complex k3 = joint_rhs(g3, e1);
    const Complex l3 = joint_rhs_derivative(g3, e1) * d3;
    const Complex g4 = g + h * k3, d4 = dg + h * l3;
    const Complex k4 = joint_rhs(g4, e2);
    const Complex l4 = joint_rhs_derivative(g4, e2) * d4;
    g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    dg += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    t = te;
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
      return {{g, FlowStatus::Swallowed, t}, dg};
  }
  return {{g, FlowStatus::Interior, 0.0}, dg};
}

FlowPoint evolve_point(Complex z, const DriveHistory& drive, double t, const FlowOptions& options) {
  return evolve_point_with_derivative(z, drive, t, options).point;
}

double derivative_at_origin(const DriveHistory& drive, double t) {
  return std::abs(evolve_point_with_derivative(Complex{0.0, 0.0}, drive, t).derivative);
}

// ---------------------------------------------------------------------------

namespace {

// Fixed-step RK4 for dz/ds = field(z, s) on [0, T], applied to every point.
template <class Field>
void rk4_flow(std::vector<Complex>& pts, double T, std::size_t substeps, Field&& field) {
  const double h = T / static_cast<double>(substeps);
  for (Complex& z : pts) {
    for (std::size_t i = 0; i < substeps; ++i) {
      const double s = h * static_cast<double>(i);
      const Complex k1 = field(z, s);
      const Complex k2 = field(z + 0.5 * h * k1, s + 0.5 * h);
      const Complex k3 = field(z + 0.5 * h * k2, s + 0.5 * h);
      const Complex k4 = field(z + h * k3, s + h);
      z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
}

}  // namespace

double composition_defect(const AngleConfig& config, double kappa, double dt,
                          std::span<const Complex> probes, std::span<const double> noise,
                          const CompositionOptions& options) {
  const std::size_t n = config.size();
  if (noise.size() != n) throw DomainError("composition_defect: noise size mismatch");
  if (!(dt > 0.0)) throw DomainError("composition_defect: dt must be > 0");
  for (const Complex& p : probes)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(p - std::polar(1.0, config[j])) < options.min_probe_distance)
        throw DomainError("composition_defect: probe too close to a driver");

  std::vector<double> b(n);
  for (std::size_t j = 0; j < n; ++j) b[j] = std::sqrt(kappa * dt) * noise[j];
  const std::vector<double> mu = drift(config);

  // Joint flow: all drivers move together along one Euler step of the SDE.
  std::vector<Complex> joint(probes.begin(), probes.end());
  std::vector<Complex> e(n);
  rk4_flow(joint, dt, options.substeps, [&](Complex g, double s) {
    const double frac = s / dt;
    for (std::size_t j = 0; j < n; ++j)
      e[j] = std::polar(1.0, config[j] + frac * (mu[j] * dt + b[j]));
    return joint_rhs(g, e);
  });

  // Sequential: single-driver maps in the frame where the trace tip stays at
  // e^{i theta_j}; the other drivers ride along as boundary points.
  std::vector<Complex> seq(probes.begin(), probes.end());
  std::vector<double> phi = config.vector();
  for (std::size_t j = 0; j < n; ++j) {
    const Complex tip = std::polar(1.0, phi[j]);
    const double omega = b[j] / dt;
    auto field = [&](Complex g, double) {
      return -g * (g + tip) / (g - tip) - Complex{0.0, 1.0} * g * omega;
    };
    rk4_flow(seq, dt, options.substeps, field);
    std::vector<Complex> others;
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) others.push_back(std::polar(1.0, phi[k]));
    rk4_flow(others, dt, options.substeps, field);
    for (std::size_t k = 0, m = 0; k < n; ++k)
      if (k != j) phi[k] = std::arg(others[m++]);
  }
  double total = 0.0;
  for (double x : b) total += x;
  const Complex rot = std::polar(1.0, total);
  double defect = 0.0;
  for (std::size_t p = 0; p < seq.size(); ++p) defect = std::max(defect, std::abs(joint[p] - rot * seq[p]));
  return defect;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

CompositionScaling composition_scaling(const AngleConfig& config, double kappa,
                                       std::span<const double> dts, std::span<const Complex> probes,
                                       std::span<const double> noise,
                                       const CompositionOptions& options) {
  CompositionScaling out;
  for (double dt : dts) {
    out.dts.push_back(dt);
    out.defects.push_back(composition_defect(config, kappa, dt, probes, noise, options));
  }
  out.slope = loglog_slope(out.dts, out.defects);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<TracePoint> trace_points(const DriveHistory& drive, std::size_t j,
                                     std::span<const double> sample_times,
                                     const FlowOptions& options) {
  if (j >= drive.n_drivers()) throw std::out_of_range("trace_points: driver index");
  const std::size_t n = drive.n_drivers();
  std::vector<Complex> e0(n), e1(n), e2(n);
  auto prev_knot = [&](double s) {
    const auto& ts = drive.times();
    auto it = std::lower_bound(ts.begin(), ts.end(), s);
    return it == ts.begin() ? 0.0 : *(it - 1);
  };

  std::vector<TracePoint> out;
  out.reserve(sample_times.size());
  for (double T : sample_times) {
    if (T < 0.0 || T > drive.duration() * (1.0 + 1e-12))
      throw DomainError("trace_points: time outside the drive history");
    T = std::min(T, drive.duration());
    drive.drivers_at(T, e0);
    TracePoint tp{T, e0[j], true};
    if (T == 0.0) {
      out.push_back(tp);
      continue;
    }
    // Leave the pole along its square-root escape, h = e(1 - 2 sqrt(tau)).
    const double tau0 = std::min(1e-10, 0.5 * T);
    Complex h = e0[j] * (1.0 - 2.0 * std::sqrt(tau0));
    double s = T - tau0;
    while (s > 0.0) {
      drive.drivers_at(s, e0);
      const double d = nearest_driver(h, e0);
      double se = std::max({s - drive.dt_max(), prev_knot(s), 0.0});
      const double limit = options.step_factor * d * d;
      if (limit < options.min_step) {
        tp.resolved = false;
        break;
      }
      if (s - se > limit) se = s - limit;
      const double step = se - s;  // negative
      drive.drivers_at(s + 0.5 * step, e1);
      drive.drivers_at(se, e2);
      const Complex k1 = joint_rhs(h, e0);
      const Complex k2 = joint_rhs(h + 0.5 * step * k1, e1);
      const Complex k3 = joint_rhs(h + 0.5 * step * k2, e1);
      const Complex k4 = joint_rhs(h + step * k3, e2);
      h += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      s = se;
      if (!std::isfinite(h.real()) || !std::isfinite(h.imag()) || std::abs(h) > 1.0 + 1e-9) {
        tp.resolved = false;
        break;
      }
    }
    if (tp.resolved) {
      const double r = std::abs(h);
      tp.z = r > 1.0 ? h / r : h;
    } else {
      tp.z = Complex{std::numeric_limits<double>::quiet_NaN(), 0.0};
    }
    out.push_back(tp);
  }
  return out;
}

namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace

bool polyline_is_simple(std::span<const Complex> pts) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t k = i + 2; k + 1 < pts.size(); ++k)
      if (segments_cross(pts[i], pts[i + 1], pts[k], pts[k + 1])) return false;
  return true;
}

}  // namespace sledyson
