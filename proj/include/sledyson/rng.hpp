#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sledyson {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the sub-stream addressed by (a, b) under `master`. Distinct
/// addresses give statistically independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ (a + 0x632be59bd9b4e019ULL)) ^
                    (b + 0x8cb92ba72f3d8dd7ULL));
}

/// One standard-normal stream.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return dist_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

/// One normal stream per particle, all derived from a single address.
class ParticleStreams {
 public:
  ParticleStreams(std::uint64_t master, std::uint64_t address, std::size_t n) {
    streams_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) streams_.emplace_back(derive_seed(master, address, j));
  }
  std::size_t size() const { return streams_.size(); }
  void fill(std::span<double> out) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = streams_[j]();
  }
  NormalStream& operator[](std::size_t j) { return streams_[j]; }

 private:
  std::vector<NormalStream> streams_;
};

}  // namespace sledyson
