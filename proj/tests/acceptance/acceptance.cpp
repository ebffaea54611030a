// Runs the full acceptance suite at production thresholds; one line per criterion.
// Exit status 0 only when every criterion passes. `--quick` uses the reduced suite.

#include <cstring>
#include <iostream>

#include "sledyson/validation.hpp"

int main(int argc, char** argv) {
  sledyson::ValidationOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) options.quick = true;
  }
  const auto reports = sledyson::run_validation(options);
  std::cout << sledyson::report_text(reports);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass();
  std::cout << (ok ? "all criteria pass" : "some criteria fail") << "\n";
  return ok ? 0 : 1;
}
