#include "regstab/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace regstab {
namespace {

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool same(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

void check_finite(std::span<const double> x) {
  for (double c : x) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coordinate");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PointConfiguration PointConfiguration::from_flat(std::size_t dim, SpaceTag space,
                                                 std::span<const double> flat) {
  if (dim == 0) throw std::invalid_argument("configuration dimension must be >= 1");
  if (flat.size() % dim != 0) {
    throw std::invalid_argument("flat coordinate count is not a multiple of dim");
  }
  check_finite(flat);
  const std::size_t n = flat.size() / dim;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row = [&](std::size_t i) { return flat.subspan(i * dim, dim); };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(row(a), row(b)); });

  PointConfiguration out(dim, space);
  out.coords_.reserve(flat.size());
  out.mult_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto r = row(order[k]);
    if (!out.mult_.empty() && same(r, out.coords(out.mult_.size() - 1))) {
      ++out.mult_.back();
    } else {
      out.coords_.insert(out.coords_.end(), r.begin(), r.end());
      out.mult_.push_back(1);
    }
  }
  return out;
}

PointConfiguration PointConfiguration::from_points(std::size_t dim, SpaceTag space,
                                                   std::span<const Point> points) {
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (const Point& p : points) {
    if (p.dim() != dim) throw std::invalid_argument("point dimension mismatch");
    flat.insert(flat.end(), p.coords().begin(), p.coords().end());
  }
  return from_flat(dim, space, flat);
}

std::uint64_t PointConfiguration::mass() const noexcept {
  return std::accumulate(mult_.begin(), mult_.end(), std::uint64_t{0});
}

std::size_t PointConfiguration::lower_bound(std::span<const double> x) const {
  std::size_t lo = 0, hi = mult_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lex_less(coords(mid), x)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::optional<std::size_t> PointConfiguration::find(std::span<const double> x) const {
  if (x.size() != dim_) return std::nullopt;
  const std::size_t i = lower_bound(x);
  if (i < mult_.size() && same(coords(i), x)) return i;
  return std::nullopt;
}

std::uint32_t PointConfiguration::multiplicity_of(std::span<const double> x) const {
  const auto i = find(x);
  return i ? mult_[*i] : 0;
}

PointConfiguration PointConfiguration::without(const Point& x,
                                               std::uint32_t count) const {
  const auto i = find(x.coords());
  if (!i || mult_[*i] < count) {
    throw std::invalid_argument("without: point not present with that multiplicity");
  }
  PointConfiguration out = *this;
  if (mult_[*i] == count) {
    out.mult_.erase(out.mult_.begin() + static_cast<std::ptrdiff_t>(*i));
    auto first = out.coords_.begin() + static_cast<std::ptrdiff_t>(*i * dim_);
    out.coords_.erase(first, first + static_cast<std::ptrdiff_t>(dim_));
  } else {
    out.mult_[*i] -= count;
  }
  return out;
}

PointConfiguration add(const PointConfiguration& config, const Point& point,
                       std::uint32_t multiplicity) {
  if (multiplicity == 0) throw std::invalid_argument("add: multiplicity must be >= 1");
  if (point.dim() != config.dim()) throw std::invalid_argument("add: dimension mismatch");
  check_finite(point.coords());
  PointConfiguration out = config;
  const std::size_t i = config.lower_bound(point.coords());
  if (i < config.entry_count() && same(config.coords(i), point.coords())) {
    out.mult_[i] += multiplicity;
    return out;
  }
  out.mult_.insert(out.mult_.begin() + static_cast<std::ptrdiff_t>(i), multiplicity);
  out.coords_.insert(out.coords_.begin() + static_cast<std::ptrdiff_t>(i * config.dim()),
                     point.coords().begin(), point.coords().end());
  return out;
}

PointConfiguration restrict(const PointConfiguration& config,
                            const RegionDescriptor& region) {
  PointConfiguration out(config.dim(), config.space());
  for (std::size_t i = 0; i < config.entry_count(); ++i) {
    auto c = config.coords(i);
    if (region.contains(c)) {
      out.coords_.insert(out.coords_.end(), c.begin(), c.end());
      out.mult_.push_back(config.multiplicity(i));
    }
  }
  return out;
}

bool leq(const PointConfiguration& config1, const PointConfiguration& config2) {
  if (config1.dim() != config2.dim() && !config1.empty()) return false;
  // Both entry lists are sorted, so a merge walk suffices.
  std::size_t j = 0;
  for (std::size_t i = 0; i < config1.entry_count(); ++i) {
    auto c = config1.coords(i);
    while (j < config2.entry_count() && lex_less(config2.coords(j), c)) ++j;
    if (j == config2.entry_count() || !same(config2.coords(j), c)) return false;
    if (config1.multiplicity(i) > config2.multiplicity(j)) return false;
  }
  return true;
}

void write_csv(std::ostream& os, const PointConfiguration& config) {
  for (std::size_t k = 0; k < config.dim(); ++k) os << "coord_" << (k + 1) << ',';
  os << "multiplicity\n";
  for (std::size_t i = 0; i < config.entry_count(); ++i) {
    for (double c : config.coords(i)) os << format_double(c) << ',';
    os << config.multiplicity(i) << '\n';
  }
}

PointConfiguration read_csv(std::istream& is, SpaceTag space) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: missing header");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 2 || line.rfind("multiplicity") == std::string::npos) {
    throw std::runtime_error("read_csv: malformed header");
  }
  const std::size_t dim = columns - 1;
  std::vector<double> flat;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> coords;
    for (std::size_t k = 0; k < dim; ++k) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("read_csv: short row");
      coords.push_back(std::stod(cell));
    }
    if (!std::getline(row, cell)) throw std::runtime_error("read_csv: missing multiplicity");
    const long m = std::stol(cell);
    if (m < 1) throw std::runtime_error("read_csv: multiplicity must be >= 1");
    for (long r = 0; r < m; ++r) flat.insert(flat.end(), coords.begin(), coords.end());
  }
  return PointConfiguration::from_flat(dim, space, flat);
}

}  // namespace regstab
