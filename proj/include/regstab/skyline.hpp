#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace regstab {

/// Number of minimal points among `count = flat.size() / d` points stored
/// row-major. A point is minimal when it dominates no other point, dominance
/// being the non-strict coordinatewise order, so coincident copies dominate
/// each other and none of them is minimal.
///
/// d = 1, 2 use a sort-and-sweep, d = 3 a sweep over a two-dimensional
/// staircase, d >= 4 a sort-filter scan against the running skyline.
std::size_t count_minimal_fast(std::span<const double> flat, std::size_t d);

/// Minimal-entry flags for entries that are already distinct and sorted
/// lexicographically, with multiplicities. An entry with multiplicity >= 2 is
/// never minimal but still dominates the entries above it.
std::vector<std::uint8_t> minimal_flags_sorted(std::span<const double> flat,
                                               std::span<const std::uint32_t> mult,
                                               std::size_t d);

}  // namespace regstab
