#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regstab/quadrature.hpp"
#include "regstab/sampling.hpp"
#include "regstab/scores.hpp"

namespace regstab {

/// Standard normal CDF, density and the antiderivative of the CDF,
/// Psi(t) = t Phi(t) + phi(t).
double normal_cdf(double t);
double normal_pdf(double t);
double normal_cdf_integral(double t);
/// Inverse of normal_cdf on (0, 1), refined to full double precision.
double normal_quantile(double p);

struct EnsembleSummary {
  std::uint64_t n_reps = 0;
  std::uint64_t base_seed = 0;
  std::vector<double> samples;
  std::vector<std::uint64_t> point_counts;
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::vector<double> normalized;  // (H - mean) / sd, empty when degenerate
  double dK_emp = 0.0;
  double dW_emp = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
  double ci_mean = 0.0;  // 95% half-widths
  double ci_var = 0.0;
  bool degenerate = false;

  std::uint64_t seed_of(std::uint64_t replicate) const;
  void write_samples_csv(std::ostream& os) const;
  std::string summary_json() const;
};

/// n_reps replicates, replicate i drawn with SeedSpec{base_seed, i}.
EnsembleSummary run_ensemble(const ScoreModel& model, const IntensitySpec& intensity,
                             std::uint64_t n_reps, std::uint64_t base_seed);

/// sup_t |F_n(t) - Phi(t)|, attained at a jump of F_n.
double ks_distance(std::span<const double> samples);
/// int |F_n(t) - Phi(t)| dt, exact between consecutive order statistics.
double wasserstein1(std::span<const double> samples);

/// Both distances after normalizing by a given mean and variance.
std::pair<double, double> distances_with_reference(std::span<const double> samples,
                                                   double mean, double var);

struct ScalingFit {
  std::vector<double> s_grid;
  std::vector<double> response;
  double C = 0.0;
  double gamma = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log(response) on log(log s).
ScalingFit scaling_fit(std::span<const std::pair<double, double>> points);

/// Var F_s for the minimal model in d = 2 from the second-order Mecke
/// formula, reduced to a two-dimensional integral in u = -log x.
double variance_mecke_minimal(double s, std::size_t d = 2, const QuadratureSpec& quad = {});

}  // namespace regstab
