#include "regstab/point.hpp"

#include <algorithm>
#include <stdexcept>

namespace regstab {

std::string_view to_string(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::cube:
      return "cube";
    case SpaceTag::lattice:
      return "lattice";
    case SpaceTag::euclidean_window:
      return "euclidean_window";
  }
  return "unknown";
}

bool Box::contains(std::span<const double> p) const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

Box Box::expanded(double pad) const {
  Box b = *this;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    b.lo[i] -= pad;
    b.hi[i] += pad;
  }
  return b;
}

Box Box::unit(std::size_t d) {
  return Box{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

Box Box::centered(std::size_t d, double half_width) {
  return Box{std::vector<double>(d, -half_width),
             std::vector<double>(d, half_width)};
}

bool dominates(std::span<const double> x, std::span<const double> y) noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < y[i]) return false;
  }
  return true;
}

bool dominates_strictly(std::span<const double> x,
                        std::span<const double> y) noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > y[i])) return false;
  }
  return true;
}

double box_volume(std::span<const double> x) noexcept {
  double v = 1.0;
  for (double c : x) v *= c;
  return v;
}

Point join(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("join: dimension mismatch");
  std::vector<double> c(a.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::max(a[i], b[i]);
  return Point(std::move(c));
}

Point meet(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("meet: dimension mismatch");
  std::vector<double> c(a.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::min(a[i], b[i]);
  return Point(std::move(c));
}

double distance_sq(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

}  // namespace regstab
