#include "regstab/region.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace regstab {

RegionDescriptor RegionDescriptor::ball(Point center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball: negative radius");
  return RegionDescriptor(Kind::ball, std::move(center), radius);
}

bool RegionDescriptor::contains(std::span<const double> p) const {
  switch (kind_) {
    case Kind::empty:
      return false;
    case Kind::whole_space:
      return true;
    case Kind::box_to_origin:
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || p[i] > anchor_[i]) return false;
      }
      return true;
    case Kind::ball:
      return distance_sq(p, anchor_.coords()) <= radius_ * radius_;
    case Kind::neighbor_set: {
      double l1 = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) l1 += std::fabs(p[i] - anchor_[i]);
      return l1 == 1.0;
    }
  }
  return false;
}

std::string RegionDescriptor::describe() const {
  std::ostringstream os;
  auto pt = [&os](const Point& x) {
    os << '(';
    for (std::size_t i = 0; i < x.dim(); ++i) os << (i ? "," : "") << x[i];
    os << ')';
  };
  switch (kind_) {
    case Kind::empty:
      os << "empty";
      break;
    case Kind::whole_space:
      os << "whole_space";
      break;
    case Kind::box_to_origin:
      os << "box_to_origin";
      pt(anchor_);
      break;
    case Kind::ball:
      os << "ball";
      pt(anchor_);
      os << " r=" << radius_;
      break;
    case Kind::neighbor_set:
      os << "neighbor_set";
      pt(anchor_);
      break;
  }
  return os.str();
}

bool is_subset(const RegionDescriptor& a, const RegionDescriptor& b) {
  using K = RegionDescriptor::Kind;
  if (a.kind() == K::empty || b.kind() == K::whole_space) return true;
  if (b.kind() == K::empty) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case K::box_to_origin:
      return dominates(b.anchor().coords(), a.anchor().coords());
    case K::ball:
      return std::sqrt(distance_sq(a.anchor().coords(), b.anchor().coords())) +
                 a.radius() <=
             b.radius();
    case K::neighbor_set:
      return a.anchor() == b.anchor();
    default:
      return false;
  }
}

}  // namespace regstab
