#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace regstab::checks {

struct Options {
  std::uint64_t seed = 1;
  /// Multiplies the number of randomized cases.
  double effort = 1.0;
  /// Scores minimal points with strict dominance (mutation smoke test).
  bool strict_fault = false;
};

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Check {
  std::string group;
  std::string description;
  std::function<Outcome(const Options&)> run;
};

/// Every property check, in a fixed order. Groups: pointproc, scores,
/// malliavin, scaling, bounds, empirics.
const std::vector<Check>& all_checks();

/// Runs the checks whose group or description contains `filter` (all when
/// empty) and prints TAP lines. Returns the number of failures.
int run_tap(const std::string& filter, const Options& options, std::ostream& os);

}  // namespace regstab::checks
