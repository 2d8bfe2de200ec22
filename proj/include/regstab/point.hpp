#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace regstab {

/// Carrier space of a configuration.
enum class SpaceTag { cube, lattice, euclidean_window };

std::string_view to_string(SpaceTag tag);

/// A point of R^d. Lattice points carry integer-valued coordinates.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Point(std::span<const double> coords)
      : coords_(coords.begin(), coords.end()) {}

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  auto operator<=>(const Point&) const = default;
  bool operator==(const Point&) const = default;

 private:
  std::vector<double> coords_;
};

/// Axis-aligned closed box [lo, hi].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
  bool contains(std::span<const double> p) const;
  double volume() const;
  Box expanded(double pad) const;
  /// Unit cube [0,1]^d.
  static Box unit(std::size_t d);
  /// Symmetric box [-h, h]^d.
  static Box centered(std::size_t d, double half_width);
};

// Coordinatewise helpers on raw coordinate spans.

/// x dominates y: x - y has all coordinates >= 0.
bool dominates(std::span<const double> x, std::span<const double> y) noexcept;
/// x strictly dominates y in every coordinate.
bool dominates_strictly(std::span<const double> x,
                        std::span<const double> y) noexcept;
/// Volume of [0, x], the product of coordinates.
double box_volume(std::span<const double> x) noexcept;
Point join(const Point& a, const Point& b);  // coordinatewise max
Point meet(const Point& a, const Point& b);  // coordinatewise min
double distance_sq(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace regstab
