#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "sledyson/circular_ensemble.hpp"

// Exact rational exponent relations between SLE_kappa, the Dyson/CS
// coupling beta and boundary conformal weights. No floating point.

namespace sledyson {

/// Canonical fraction: den > 0, gcd(|num|, den) = 1. Arithmetic throws
/// std::overflow_error instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num);  // NOLINT: implicit from integers
  Rational(std::int64_t num, std::int64_t den);

  /// "p", "p/q" or "-p/q".
  static Rational parse(const std::string& s);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  Rational operator-() const;
  Rational& operator+=(Rational b) { return *this = *this + b; }
  Rational& operator-=(Rational b) { return *this = *this - b; }
  Rational& operator*=(Rational b) { return *this = *this * b; }
  Rational& operator/=(Rational b) { return *this = *this / b; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(Rational a, Rational b);
  friend bool operator>(Rational a, Rational b) { return b < a; }
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }
  friend bool operator>=(Rational a, Rational b) { return !(a < b); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// 4/kappa (Dyson), 2/kappa (CFT reading of the p-leg fusion) or 8/kappa
/// (Calogero-Sutherland coupling once the measure carries the conformal factor).
Rational beta_from_kappa(Rational kappa, BetaConvention convention = BetaConvention::Dyson4OverKappa);

/// Boundary Kac weight h_{1,p+1} = p(2p + 4 - kappa)/(2 kappa).
Rational kac_h_1_s(Rational kappa, std::int64_t p);

/// p(p-1)/kappa = h_{1,p+1} - p h_{1,2}; p >= 2.
Rational fusion_exponent(std::int64_t p, Rational kappa);

/// p(p-1) beta / 2, from prod_{j<k} delta^beta; p >= 2.
Rational ansatz_exponent(std::int64_t p, Rational beta);

/// h_{2,1} = (6 - kappa)/(2 kappa).
Rational h21(Rational kappa);

/// (kappa^2 - 16)/(32 kappa), the one-arm decay rate in the LSW clock.
Rational one_arm_lambda(Rational kappa);

}  // namespace sledyson
