#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sledyson/angles.hpp"

namespace sledyson {

enum class SampleSource { DysonSde, Coe, Cue, Cse };

std::string to_string(SampleSource s);
SampleSource sample_source_from_string(const std::string& s);

struct SampleMeta {
  SampleSource created_by = SampleSource::DysonSde;
  std::size_t n_particles = 0;
  double kappa = 0.0;  // 0 for matrix samplers
  double beta = 0.0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double burn_in = 0.0;
  double thinning = 0.0;

  friend bool operator==(const SampleMeta&, const SampleMeta&) = default;
};

/// Row-major (n_samples x N) matrix of angles. Each row is a valid
/// AngleConfig; `times` holds the process time of each row (0 for matrix
/// samplers).
class SampleBatch {
 public:
  SampleBatch() = default;
  SampleBatch(SampleMeta meta, std::size_t n_rows);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return meta_.n_particles; }
  const SampleMeta& meta() const { return meta_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols(), cols()};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols(), cols()}; }
  AngleConfig config(std::size_t i) const {
    return AngleConfig(std::vector<double>(row(i).begin(), row(i).end()));
  }
  void set_row(std::size_t i, const AngleConfig& c, double t = 0.0);

  std::vector<double>& times() { return times_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;

 private:
  SampleMeta meta_;
  std::size_t n_rows_ = 0;
  std::vector<double> data_;
  std::vector<double> times_;
};

}  // namespace sledyson
