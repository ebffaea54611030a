#include "sledyson/angles.hpp"

#include <algorithm>
#include <numeric>

namespace sledyson {

AngleConfig::AngleConfig(std::vector<double> angles) : angles_(std::move(angles)) {
  if (angles_.empty()) throw DomainError("AngleConfig: need at least one angle");
  for (double a : angles_) {
    if (!std::isfinite(a) || a < 0.0 || a >= kTwoPi)
      throw DomainError("AngleConfig: angle outside [0, 2pi): " + std::to_string(a));
  }
  if (angles_.size() > 1 && min_gap() <= 0.0)
    throw DomainError("AngleConfig: coincident angles");
}

AngleConfig AngleConfig::wrapped(std::vector<double> angles) {
  for (double& a : angles) a = wrap_2pi(a);
  return AngleConfig(std::move(angles));
}

AngleConfig AngleConfig::equally_spaced(std::size_t n, double offset) {
  std::vector<double> a(n);
  for (std::size_t j = 0; j < n; ++j)
    a[j] = wrap_2pi(offset + kTwoPi * static_cast<double>(j) / static_cast<double>(n));
  return AngleConfig(std::move(a));
}

double AngleConfig::min_gap() const {
  if (angles_.size() < 2) return kTwoPi;
  std::vector<double> s = angles_;
  std::sort(s.begin(), s.end());
  double g = kTwoPi - (s.back() - s.front());
  for (std::size_t i = 1; i < s.size(); ++i) g = std::min(g, s[i] - s[i - 1]);
  return g;
}

AngleConfig AngleConfig::rotated(double c) const {
  std::vector<double> a = angles_;
  for (double& x : a) x = wrap_2pi(x + c);
  return AngleConfig(std::move(a));
}

std::vector<std::size_t> circular_order(std::span<const double> angles) {
  std::vector<std::size_t> idx(angles.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t i, std::size_t j) { return angles[i] < angles[j]; });
  return idx;
}

bool same_cyclic_order(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  const std::size_t n = a.size();
  if (n < 3) return true;
  auto oa = circular_order(a);
  auto ob = circular_order(b);
  auto start = std::find(ob.begin(), ob.end(), oa[0]);
  const auto shift = static_cast<std::size_t>(start - ob.begin());
  for (std::size_t i = 0; i < n; ++i)
    if (oa[i] != ob[(i + shift) % n]) return false;
  return true;
}

}  // namespace sledyson
