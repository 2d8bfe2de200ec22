#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "regstab/scores.hpp"

namespace regstab::oracle {

/// O(n^2) count of points that dominate no other point (non-strict order).
std::size_t brute_force_minimal_count(std::span<const double> flat, std::size_t d);

/// Ein(x) = int_0^x (1 - e^{-t}) / t dt.
double ein(double x);

/// c_{alpha,s}(y) in d = 2 from four values of Ein.
double c_alpha_s_d2(double y1, double y2, double alpha, double s);

/// int_{[0,1]^d} exp(-t x_1 ... x_d) dx, as the Laplace functional of a
/// Gamma(d) variable integrated by fine composite Simpson.
double product_laplace(double t, std::size_t d);

/// c_{alpha,s}(y) for any d by inclusion-exclusion over the corners of [y,1].
double c_alpha_s_corners(std::span<const double> y, double alpha, double s);

/// Lattice model on a finite window: P{D_x H != 0} and P{D^2_{x1,x2} H != 0}
/// by enumerating the occupancy of every site that can matter. Sites outside
/// the window are empty; sites inside are occupied with probability 1 - e^{-s}.
/// Multiplicities above one never change whether a difference vanishes for
/// non-negative weights, so occupancy suffices.
class LatticeEnumerator {
 public:
  LatticeEnumerator(const ScoreModel& model, const IntensitySpec& intensity);

  double p_first(const Point& x) const;
  double p_second(const Point& x1, const Point& x2) const;

 private:
  double enumerate(const std::vector<Point>& added) const;

  ScoreModel model_;
  IntensitySpec intensity_;
};

}  // namespace regstab::oracle
