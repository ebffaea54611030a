#include "sledyson/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "sledyson/version.hpp"

namespace sledyson {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("not an unsigned integer: '" + s + "'");
  }
  return v;
}

void put_meta(Table& t, const SampleMeta& m, const std::string& kind) {
  t.metadata = {
      {"format", kind},
      {"version", kVersion},
      {"created_by", to_string(m.created_by)},
      {"n_particles", std::to_string(m.n_particles)},
      {"kappa", format_double(m.kappa)},
      {"beta", format_double(m.beta)},
      {"seed", std::to_string(m.seed)},
      {"dt", format_double(m.dt)},
      {"burn_in", format_double(m.burn_in)},
      {"thinning", format_double(m.thinning)},
  };
}

SampleMeta get_meta(const Table& t, const std::string& kind) {
  if (t.meta("format") != kind) {
    throw std::runtime_error("expected a " + kind + " file, found " + t.meta("format"));
  }
  SampleMeta m;
  m.created_by = sample_source_from_string(t.meta("created_by"));
  m.n_particles = static_cast<std::size_t>(parse_u64(t.meta("n_particles")));
  m.kappa = parse_double(t.meta("kappa"));
  m.beta = parse_double(t.meta("beta"));
  m.seed = parse_u64(t.meta("seed"));
  m.dt = parse_double(t.meta("dt"));
  m.burn_in = parse_double(t.meta("burn_in"));
  m.thinning = parse_double(t.meta("thinning"));
  return m;
}

std::vector<std::string> angle_columns(std::size_t n) {
  std::vector<std::string> cols{"t"};
  for (std::size_t j = 1; j <= n; ++j) cols.push_back("theta_" + std::to_string(j));
  return cols;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("not a number: '" + s + "'");
  }
  return v;
}

const std::string& Table::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  throw std::runtime_error("missing metadata key '" + key + "'");
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::runtime_error("missing column '" + name + "'");
}

void write_table(std::ostream& os, const Table& table) {
  for (const auto& [k, v] : table.metadata) os << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::runtime_error("ragged table row");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && !line.empty() && line.front() == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body.front() == ' ') body.erase(0, 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw std::runtime_error("bad metadata line: " + line);
      t.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (line.empty()) continue;
    if (!have_header) {
      t.columns = split(line);
      have_header = true;
      continue;
    }
    auto row = split(line);
    if (row.size() != t.columns.size()) throw std::runtime_error("ragged CSV row: " + line);
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::runtime_error("CSV has no header line");
  return t;
}

Table to_table(const SampleBatch& batch) {
  Table t;
  put_meta(t, batch.meta(), "sample_batch");
  t.columns = angle_columns(batch.cols());
  t.rows.reserve(batch.rows());
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    std::vector<std::string> row{format_double(batch.times()[i])};
    for (double v : batch.row(i)) row.push_back(format_double(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

SampleBatch batch_from_table(const Table& table) {
  const SampleMeta meta = get_meta(table, "sample_batch");
  if (table.columns != angle_columns(meta.n_particles)) throw std::runtime_error("unexpected columns");
  SampleBatch batch(meta, table.rows.size());
  std::vector<double> angles(meta.n_particles);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < meta.n_particles; ++j) angles[j] = parse_double(table.rows[i][j + 1]);
    batch.set_row(i, AngleConfig(angles), parse_double(table.rows[i][0]));
  }
  return batch;
}

void write_sample_batch(std::ostream& os, const SampleBatch& batch) { write_table(os, to_table(batch)); }

SampleBatch read_sample_batch(std::istream& is) { return batch_from_table(read_table(is)); }

Table to_table(const TrajectoryRecord& record, const SampleMeta& meta) {
  Table t;
  put_meta(t, meta, "trajectory");
  const std::size_t n = meta.n_particles;
  const bool inc = !record.brownian_increments.empty();
  t.metadata.emplace_back("increments", inc ? "1" : "0");
  t.columns = angle_columns(n);
  if (inc) {
    for (std::size_t j = 1; j <= n; ++j) t.columns.push_back("dB_" + std::to_string(j));
  }
  for (std::size_t k = 0; k < record.times.size(); ++k) {
    std::vector<std::string> row{format_double(record.times[k])};
    for (double v : record.states[k].angles()) row.push_back(format_double(v));
    if (inc) {
      for (double v : record.brownian_increments[k]) row.push_back(format_double(v));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

TrajectoryFile trajectory_from_table(const Table& table) {
  TrajectoryFile f;
  f.meta = get_meta(table, "trajectory");
  const std::size_t n = f.meta.n_particles;
  const bool inc = table.meta("increments") == "1";
  std::vector<double> angles(n);
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    f.record.times.push_back(parse_double(row[0]));
    for (std::size_t j = 0; j < n; ++j) angles[j] = parse_double(row[j + 1]);
    f.record.states.emplace_back(angles);
    if (inc) {
      std::vector<double> db(n);
      for (std::size_t j = 0; j < n; ++j) db[j] = parse_double(row[n + 1 + j]);
      f.record.brownian_increments.push_back(std::move(db));
    }
  }
  return f;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sledyson
