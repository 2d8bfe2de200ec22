#pragma once

#include <span>
#include <string>

#include "regstab/point.hpp"

namespace regstab {

/// Stabilization region attached to a point. Membership tests are exact.
class RegionDescriptor {
 public:
  enum class Kind { empty, box_to_origin, ball, neighbor_set, whole_space };

  static RegionDescriptor empty() { return RegionDescriptor(Kind::empty, {}, 0.0); }
  static RegionDescriptor whole_space() {
    return RegionDescriptor(Kind::whole_space, {}, 0.0);
  }
  /// [0, corner] = [0, corner_1] x ... x [0, corner_d].
  static RegionDescriptor box_to_origin(Point corner) {
    return RegionDescriptor(Kind::box_to_origin, std::move(corner), 0.0);
  }
  /// Closed Euclidean ball.
  static RegionDescriptor ball(Point center, double radius);
  /// center + B with B the 2d nearest lattice neighbours (4 in Z^2).
  static RegionDescriptor neighbor_set(Point center) {
    return RegionDescriptor(Kind::neighbor_set, std::move(center), 0.0);
  }

  Kind kind() const noexcept { return kind_; }
  bool is_empty() const noexcept { return kind_ == Kind::empty; }
  const Point& anchor() const noexcept { return anchor_; }
  double radius() const noexcept { return radius_; }

  bool contains(std::span<const double> p) const;
  bool contains(const Point& p) const { return contains(p.coords()); }

  std::string describe() const;

  bool operator==(const RegionDescriptor&) const = default;

 private:
  RegionDescriptor(Kind kind, Point anchor, double radius)
      : kind_(kind), anchor_(std::move(anchor)), radius_(radius) {}

  Kind kind_;
  Point anchor_;
  double radius_;
};

/// Set inclusion a ⊆ b. Exact for pairs of the same kind and for the empty
/// and whole-space kinds; other mixed pairs are reported as not included.
bool is_subset(const RegionDescriptor& a, const RegionDescriptor& b);

}  // namespace regstab
