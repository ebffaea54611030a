#include "sledyson/sample_batch.hpp"

namespace sledyson {

std::string to_string(SampleSource s) {
  switch (s) {
    case SampleSource::DysonSde: return "DYSON_SDE";
    case SampleSource::Coe: return "COE";
    case SampleSource::Cue: return "CUE";
    case SampleSource::Cse: return "CSE";
  }
  return "UNKNOWN";
}

SampleSource sample_source_from_string(const std::string& s) {
  if (s == "DYSON_SDE") return SampleSource::DysonSde;
  if (s == "COE") return SampleSource::Coe;
  if (s == "CUE") return SampleSource::Cue;
  if (s == "CSE") return SampleSource::Cse;
  throw std::invalid_argument("unknown sample source: " + s);
}

SampleBatch::SampleBatch(SampleMeta meta, std::size_t n_rows)
    : meta_(meta), n_rows_(n_rows), data_(n_rows * meta.n_particles, 0.0), times_(n_rows, 0.0) {
  if (meta_.n_particles == 0) throw DomainError("SampleBatch: n_particles must be >= 1");
}

void SampleBatch::set_row(std::size_t i, const AngleConfig& c, double t) {
  if (c.size() != cols()) throw DomainError("SampleBatch::set_row: width mismatch");
  auto r = row(i);
  for (std::size_t j = 0; j < cols(); ++j) r[j] = c[j];
  times_[i] = t;
}

}  // namespace sledyson
