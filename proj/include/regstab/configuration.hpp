#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "regstab/point.hpp"
#include "regstab/region.hpp"

namespace regstab {

/// Finite counting measure on R^d: distinct locations with positive integer
/// multiplicities. Entries are kept in lexicographic order of their
/// coordinates, so two configurations with the same mass at the same
/// locations compare equal.
class PointConfiguration {
 public:
  PointConfiguration() = default;
  PointConfiguration(std::size_t dim, SpaceTag space) : dim_(dim), space_(space) {}

  /// Builds a configuration from `count` points stored row-major in `flat`
  /// (count * dim values). Coincident points are merged into multiplicities.
  static PointConfiguration from_flat(std::size_t dim, SpaceTag space,
                                      std::span<const double> flat);
  static PointConfiguration from_points(std::size_t dim, SpaceTag space,
                                        std::span<const Point> points);

  std::size_t dim() const noexcept { return dim_; }
  SpaceTag space() const noexcept { return space_; }
  /// Number of distinct locations.
  std::size_t entry_count() const noexcept { return mult_.size(); }
  bool empty() const noexcept { return mult_.empty(); }
  /// Total mass (points counted with multiplicity).
  std::uint64_t mass() const noexcept;

  std::span<const double> coords(std::size_t entry) const {
    return {coords_.data() + entry * dim_, dim_};
  }
  Point point(std::size_t entry) const { return Point(coords(entry)); }
  std::uint32_t multiplicity(std::size_t entry) const { return mult_[entry]; }
  std::span<const double> flat_coords() const noexcept { return coords_; }
  std::span<const std::uint32_t> multiplicities() const noexcept { return mult_; }

  std::optional<std::size_t> find(std::span<const double> x) const;
  std::uint32_t multiplicity_of(std::span<const double> x) const;
  bool contains(const Point& x) const { return multiplicity_of(x.coords()) > 0; }

  /// Removes `count` copies of x (count not exceeding its multiplicity).
  PointConfiguration without(const Point& x, std::uint32_t count = 1) const;

  bool operator==(const PointConfiguration&) const = default;

 private:
  friend PointConfiguration add(const PointConfiguration&, const Point&,
                                std::uint32_t);
  friend PointConfiguration restrict(const PointConfiguration&,
                                     const RegionDescriptor&);

  std::size_t lower_bound(std::span<const double> x) const;

  std::size_t dim_ = 0;
  SpaceTag space_ = SpaceTag::cube;
  std::vector<double> coords_;
  std::vector<std::uint32_t> mult_;
};

/// config + multiplicity * delta_point.
PointConfiguration add(const PointConfiguration& config, const Point& point,
                       std::uint32_t multiplicity = 1);

/// Restriction of the measure to a region; multiplicities are kept.
PointConfiguration restrict(const PointConfiguration& config,
                            const RegionDescriptor& region);

/// config1 <= config2 as measures: every multiplicity of config1 is at most the
/// matching multiplicity of config2.
bool leq(const PointConfiguration& config1, const PointConfiguration& config2);

/// CSV with header coord_1,...,coord_d,multiplicity.
void write_csv(std::ostream& os, const PointConfiguration& config);
PointConfiguration read_csv(std::istream& is, SpaceTag space);

}  // namespace regstab
