#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sledyson {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an operation is evaluated at a singular configuration
/// (coincident angles, a point sitting on a driving singularity, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical integration could not proceed (collision retries exhausted,
/// non-convergent iteration).
class IntegratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduce an angle into [0, 2pi).
inline double wrap_2pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Reduce an angle difference into (-pi, pi].
inline double wrap_pi(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Counter-clockwise distance from `from` to `to`, in [0, 2pi).
inline double ccw_distance(double from, double to) { return wrap_2pi(to - from); }

/// N particle angles on the unit circle. Entries live in [0, 2pi) and are
/// pairwise distinct; the particle order is the label order, not the
/// circular order.
class AngleConfig {
 public:
  AngleConfig() = default;
  /// Validates the invariants; throws DomainError otherwise.
  explicit AngleConfig(std::vector<double> angles);

  /// Wraps each entry into [0, 2pi) before validating.
  static AngleConfig wrapped(std::vector<double> angles);
  static AngleConfig equally_spaced(std::size_t n, double offset = 0.0);

  std::size_t size() const { return angles_.size(); }
  double operator[](std::size_t j) const { return angles_[j]; }
  std::span<const double> angles() const { return angles_; }
  const std::vector<double>& vector() const { return angles_; }

  /// Smallest circular distance between any two particles.
  double min_gap() const;

  /// Same configuration rotated by `c` radians.
  AngleConfig rotated(double c) const;

  friend bool operator==(const AngleConfig&, const AngleConfig&) = default;

 private:
  std::vector<double> angles_;
};

/// Indices of the particles sorted by angle.
std::vector<std::size_t> circular_order(std::span<const double> angles);

/// True when `b` visits the particles in the same cyclic order as `a`.
bool same_cyclic_order(std::span<const double> a, std::span<const double> b);

}  // namespace sledyson
