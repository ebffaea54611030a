#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sledyson/dyson_process.hpp"
#include "sledyson/sample_batch.hpp"

// CSV files: '#'-prefixed `key=value` metadata lines, one header line of
// column names, then comma-separated rows. Floats are written with 17
// significant digits so reading a file back reproduces every bit.

namespace sledyson {

std::string format_double(double x);
double parse_double(const std::string& s);

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Value of a metadata key; throws when absent.
  const std::string& meta(const std::string& key) const;
  std::size_t column(const std::string& name) const;
  friend bool operator==(const Table&, const Table&) = default;
};

void write_table(std::ostream& os, const Table& table);
Table read_table(std::istream& is);

/// Columns t, theta_1..theta_N; metadata carries SampleMeta and the version.
Table to_table(const SampleBatch& batch);
SampleBatch batch_from_table(const Table& table);
void write_sample_batch(std::ostream& os, const SampleBatch& batch);
SampleBatch read_sample_batch(std::istream& is);

struct TrajectoryFile {
  SampleMeta meta;
  TrajectoryRecord record;
};

/// Columns t, theta_1..N and, when recorded, dB_1..N (the increment ending at t;
/// zero on the first row).
Table to_table(const TrajectoryRecord& record, const SampleMeta& meta);
TrajectoryFile trajectory_from_table(const Table& table);

/// Writes `content` to `path`, or to stdout when path is "-".
void write_output(const std::string& path, const std::string& content);

}  // namespace sledyson
