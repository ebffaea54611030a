#pragma once

#include <cstdint>
#include <string>
#include <vector>

// The acceptance suite, shared by the acceptance test and `sledyson validate`.

namespace sledyson {

struct CheckResult {
  std::string criterion_id;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// Human-readable comparison, e.g. "KS distance < threshold".
  std::string detail;
};

struct CriterionReport {
  int number = 0;
  std::string title;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool pass() const;
  /// The check with the least margin (first failing one if any).
  const CheckResult& worst() const;
};

struct ValidationOptions {
  /// Reduced sample counts and grids with relaxed thresholds:
  /// criterion 1 uses 2e4 samples and KS < 0.02, criterion 2 uses 2e3
  /// samples, spectral grids stop at M = 2048 with eigenvalue tolerance 3e-3.
  bool quick = false;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  /// Criterion numbers to run; empty runs 1..10.
  std::vector<int> only;
};

inline constexpr int kCriterionCount = 10;

CriterionReport run_criterion(int number, const ValidationOptions& options);
std::vector<CriterionReport> run_validation(const ValidationOptions& options);

/// {"quick": ..., "all_pass": ..., "results": [{criterion_id, value,
/// threshold, pass, detail}, ...]}
std::string report_json(const std::vector<CriterionReport>& reports, bool quick);
/// One "PASS"/"FAIL" line per criterion.
std::string report_text(const std::vector<CriterionReport>& reports);

}  // namespace sledyson
