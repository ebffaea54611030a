#include "sledyson/exponents.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sledyson/angles.hpp"

namespace sledyson {

namespace {

using Wide = __int128;

Rational make(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide a = num < 0 ? -num : num;
  Wide b = den;
  while (b != 0) {
    const Wide t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr Wide lo = std::numeric_limits<std::int64_t>::min() + 1;
  constexpr Wide hi = std::numeric_limits<std::int64_t>::max();
  if (num < lo || num > hi || den > hi) throw std::overflow_error("rational overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::invalid_argument("not an integer: " + std::string(s));
  }
  return v;
}

void require_positive(Rational kappa) {
  if (kappa.num() <= 0) throw DomainError("kappa must be positive");
}

void require_p(std::int64_t p, std::int64_t min) {
  if (p < min) throw DomainError("p must be at least " + std::to_string(min));
}

}  // namespace

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("zero denominator");
  Wide n = num, d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(num, den);
  n /= g;
  d /= g;
  if (n > std::numeric_limits<std::int64_t>::max() || d > std::numeric_limits<std::int64_t>::max()) {
    throw std::overflow_error("rational overflow");
  }
  num_ = static_cast<std::int64_t>(n);
  den_ = static_cast<std::int64_t>(d);
}

Rational Rational::parse(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(parse_int(s));
  return Rational(parse_int(std::string_view(s).substr(0, slash)),
                  parse_int(std::string_view(s).substr(slash + 1)));
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(Rational a, Rational b) {
  return make(Wide(a.num_) * b.den_ + Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
}

Rational operator-(Rational a, Rational b) {
  return make(Wide(a.num_) * b.den_ - Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
}

Rational operator*(Rational a, Rational b) {
  return make(Wide(a.num_) * b.num_, Wide(a.den_) * b.den_);
}

Rational operator/(Rational a, Rational b) {
  if (b.num_ == 0) throw std::domain_error("division by zero");
  return make(Wide(a.num_) * b.den_, Wide(a.den_) * b.num_);
}

Rational Rational::operator-() const { return make(-Wide(num_), den_); }

bool operator<(Rational a, Rational b) { return Wide(a.num_) * b.den_ < Wide(b.num_) * a.den_; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational beta_from_kappa(Rational kappa, BetaConvention convention) {
  require_positive(kappa);
  switch (convention) {
    case BetaConvention::Dyson4OverKappa: return Rational(4) / kappa;
    case BetaConvention::Cft2OverKappa: return Rational(2) / kappa;
    case BetaConvention::Erratum8OverKappa: return Rational(8) / kappa;
  }
  throw std::invalid_argument("unknown beta convention");
}

Rational kac_h_1_s(Rational kappa, std::int64_t p) {
  require_positive(kappa);
  require_p(p, 1);
  return Rational(p) * (Rational(2 * p + 4) - kappa) / (Rational(2) * kappa);
}

Rational fusion_exponent(std::int64_t p, Rational kappa) {
  require_positive(kappa);
  require_p(p, 2);
  return Rational(p) * Rational(p - 1) / kappa;
}

Rational ansatz_exponent(std::int64_t p, Rational beta) {
  require_p(p, 2);
  return Rational(p) * Rational(p - 1) * beta / Rational(2);
}

Rational h21(Rational kappa) {
  require_positive(kappa);
  return (Rational(6) - kappa) / (Rational(2) * kappa);
}

Rational one_arm_lambda(Rational kappa) {
  require_positive(kappa);
  return (kappa * kappa - Rational(16)) / (Rational(32) * kappa);
}

}  // namespace sledyson
