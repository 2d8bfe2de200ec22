#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "regstab/bounds.hpp"
#include "regstab/malliavin.hpp"
#include "regstab/quadrature.hpp"
#include "regstab/scores.hpp"

namespace regstab::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kBadConfig = 2, kIoError = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every setting of a run. The config file uses exactly these field names as
/// keys, one `key = value` per line, `#` starting a comment.
struct RunConfig {
  std::string command;
  std::string model = "minimal";
  double s = 100.0;
  std::size_t d = 2;
  double p = 1.0;
  std::uint64_t n_reps = 100;
  std::uint64_t base_seed = 1;

  QuadratureSpec quad;
  McSpec mc;

  int lattice_n = 10;   // lattice weight 1{x in [-n, n]^2}
  double rho = 0.0;     // rgg radius; 0 picks k_d s rho^d = log s
  double pad = -1.0;    // rgg window padding; negative means rho

  std::size_t grid_per_axis = 32;
  std::size_t pair_grid_per_axis = 8;

  std::vector<double> s_grid;
  std::string filter;
  double effort = 1.0;
  bool strict_fault = false;

  std::string out = "samples.csv";
  std::string summary = "summary.json";
  std::string report = "-";
  std::string main_report;

  /// Parses and stores one key; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  ScoreModel score_model() const;
  IntensitySpec intensity(const ScoreModel& model) const;

  static const std::vector<std::string>& keys();
};

/// Reads `key = value` lines into a map, in file order.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_bound(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);

/// Bound report for one configuration: outer integrals plus the variance
/// (Mecke quadrature for minimal d = 2, exact sum for the lattice, ensemble
/// otherwise).
BoundReport evaluate_bound(const RunConfig& config);

/// Full command line entry point; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace regstab::cli
