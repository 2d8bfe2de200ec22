#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>

#include "regstab/configuration.hpp"
#include "regstab/point.hpp"
#include "regstab/region.hpp"
#include "regstab/sampling.hpp"

namespace regstab {

enum class ModelTag { minimal, lattice_isolated, rgg_isolated };

std::string_view to_string(ModelTag tag);
ModelTag parse_model_tag(std::string_view name);

/// Score function, stabilization region, stabilization rate and moment bound
/// of one of the three supported models.
///
///  - minimal: indicator that x is a minimal point, on [0,1]^d.
///  - lattice_isolated: w(x) * 1{no point at the 4 nearest neighbours}, on Z^2.
///  - rgg_isolated: w_s(x) * 1{no other point within distance rho}, on R^d,
///    with a radial weight profile.
struct ScoreModel {
  ModelTag tag = ModelTag::minimal;
  double s = 1.0;
  std::size_t d = 2;
  double p = 1.0;  // moment exponent in (0, 1]
  double rho = 0.0;  // rgg connection radius

  /// Lattice weight w(x), bounded by one.
  std::function<double(std::span<const double>)> lattice_weight;
  /// rgg weight as a function of the distance to the origin.
  std::function<double(double)> radial_weight;
  /// Box outside of which the weight vanishes (lattice and rgg).
  Box weight_support;

  /// Mutation hook for the verification suite: scores minimal points with
  /// strict dominance while regions keep the non-strict order.
  bool strict_dominance_fault = false;

  double zeta() const { return p / (40.0 + 10.0 * p); }
  double beta() const { return p / (32.0 + 4.0 * p); }

  /// Weight at x (1 for the minimal model).
  double weight(std::span<const double> x) const;
  /// The moment bound M_{s,p}(x) of the score at x.
  double moment_bound(std::span<const double> x) const { return weight(x); }

  void validate() const;
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(std::size_t d);

ScoreModel minimal_model(double s, std::size_t d, double p = 1.0);

/// Isolated lattice points with w = 1{x in [-n, n]^2}.
ScoreModel lattice_model(int n);
ScoreModel lattice_model(std::function<double(std::span<const double>)> weight,
                         Box support);

/// Isolated rgg vertices with the logarithmic weight
/// w_s(x) = log(s / |x|) 1{|x| < s}.
ScoreModel rgg_model(double s, std::size_t d, double rho);
ScoreModel rgg_model(double s, std::size_t d, double rho,
                     std::function<double(double)> radial_weight, double support_radius);

/// Radius with k_d s rho^d = log s, a point of the Gaussian regime.
double rgg_log_regime_radius(double s, std::size_t d);

/// Poisson intensity the statistic is simulated under: the unit cube for the
/// minimal model; the weight support padded by one site (lattice) or by rho
/// (rgg) so that every weighted point sees the stationary process.
IntensitySpec default_intensity(const ScoreModel& model);

struct StatisticValue {
  double value = 0.0;
  std::uint64_t point_count = 0;
  std::uint64_t scored_count = 0;  // points with non-zero score
};

/// Score of one copy of x in config. Throws if x is not in config.
double score(const ScoreModel& model, const Point& x, const PointConfiguration& config);

/// R_s(x, config), where config already contains x. Empty when the
/// minimality or isolation test fails.
RegionDescriptor region(const ScoreModel& model, const Point& x,
                        const PointConfiguration& config);

/// Stabilization rate r_s(x, y), +inf outside the region.
double rate(const ScoreModel& model, const Point& x, const Point& y);

/// H_s = sum of scores over all points, counted with multiplicity.
StatisticValue statistic(const ScoreModel& model, const PointConfiguration& config);

/// Sum of scores computed point by point through score(); O(n^2).
double statistic_by_scores(const ScoreModel& model, const PointConfiguration& config);

}  // namespace regstab
