#pragma once

#include <cstddef>
#include <vector>

#include "regstab/configuration.hpp"
#include "regstab/rng.hpp"
#include "regstab/scores.hpp"

namespace regstab::gen {

/// Models whose scores are dyadic rationals, so sums of scores are exact in
/// any order. Minimal points live in [0,1]^d, lattice points in [-4,4]^2 with
/// weight k/8 on [-3,3]^2, rgg points on the grid (Z/4)^2 within [-3,3]^2
/// with rho = 1 and a log weight rounded down to a multiple of 1/8.
ScoreModel exact_model(ModelTag tag, std::size_t d = 2, bool strict_fault = false);

/// Coordinates are drawn often enough from a coarse grid that duplicates,
/// shared coordinates and distance ties at rho all occur.
Point random_point(const ScoreModel& model, Rng& rng);
PointConfiguration random_config(const ScoreModel& model, Rng& rng, std::size_t max_entries = 12);

/// Every point of the configuration, repeated by multiplicity.
std::vector<Point> expand(const PointConfiguration& config);
PointConfiguration collect(const ScoreModel& model, const std::vector<Point>& points);

SpaceTag space_of(const ScoreModel& model);

}  // namespace regstab::gen
