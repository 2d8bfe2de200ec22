#pragma once

#include <cstddef>
#include <vector>

#include "regstab/configuration.hpp"
#include "regstab/point.hpp"
#include "regstab/rng.hpp"

namespace regstab {

/// Poisson process with intensity s * Q on one of the three carrier spaces.
///  - cube: Q = Lebesgue on [0,1]^d (window and pad ignored)
///  - lattice: Q = counting measure on the integer sites of `window`
///  - euclidean_window: Q = Lebesgue on `window` expanded by `pad`
struct IntensitySpec {
  SpaceTag space = SpaceTag::cube;
  double s = 1.0;
  std::size_t d = 2;
  Box window;
  double pad = 0.0;

  void validate() const;
  /// Q-measure of the sampled region (number of sites for the lattice).
  double base_measure() const;
  /// The region actually sampled (window + pad, or the unit cube).
  Box sampled_box() const;

  static IntensitySpec cube(double s, std::size_t d);
  static IntensitySpec lattice(double s, Box window);
  static IntensitySpec euclidean(double s, Box window, double pad);
};

/// Draws one realisation. Coordinates of the cube and euclidean models are
/// generated point by point from a Poisson count; lattice sites are visited in
/// lexicographic order, each getting an independent Poisson(s) multiplicity.
PointConfiguration sample_poisson(const IntensitySpec& spec, const SeedSpec& seed);

/// Same draw as sample_poisson for the cube and euclidean spaces, returned as
/// raw row-major coordinates without merging coincident points.
std::vector<double> sample_poisson_flat(const IntensitySpec& spec, Rng& rng);

}  // namespace regstab
