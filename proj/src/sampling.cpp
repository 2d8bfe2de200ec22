#include "regstab/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace regstab {

void IntensitySpec::validate() const {
  if (!std::isfinite(s) || s < 0.0) {
    throw std::invalid_argument("intensity multiplier s must be finite and >= 0");
  }
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  if (space == SpaceTag::cube) return;
  if (window.dim() != d || window.hi.size() != d) {
    throw std::invalid_argument("window dimension does not match d");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(window.hi[i] >= window.lo[i]) || !std::isfinite(window.lo[i]) ||
        !std::isfinite(window.hi[i])) {
      throw std::invalid_argument("empty window");
    }
    if (space == SpaceTag::euclidean_window && !(window.hi[i] > window.lo[i])) {
      throw std::invalid_argument("empty window");
    }
  }
  if (space == SpaceTag::lattice) {
    for (std::size_t i = 0; i < d; ++i) {
      if (std::floor(window.hi[i]) < std::ceil(window.lo[i])) {
        throw std::invalid_argument("lattice window contains no site");
      }
    }
  }
  if (!(pad >= 0.0) || !std::isfinite(pad)) throw std::invalid_argument("pad must be >= 0");
}

double IntensitySpec::base_measure() const {
  switch (space) {
    case SpaceTag::cube:
      return 1.0;
    case SpaceTag::euclidean_window:
      return window.expanded(pad).volume();
    case SpaceTag::lattice: {
      double n = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        n *= std::floor(window.hi[i]) - std::ceil(window.lo[i]) + 1.0;
      }
      return n;
    }
  }
  return 0.0;
}

Box IntensitySpec::sampled_box() const {
  switch (space) {
    case SpaceTag::cube:
      return Box::unit(d);
    case SpaceTag::euclidean_window:
      return window.expanded(pad);
    case SpaceTag::lattice:
      return window;
  }
  return window;
}

IntensitySpec IntensitySpec::cube(double s, std::size_t d) {
  IntensitySpec spec;
  spec.space = SpaceTag::cube;
  spec.s = s;
  spec.d = d;
  spec.window = Box::unit(d);
  return spec;
}

IntensitySpec IntensitySpec::lattice(double s, Box window) {
  IntensitySpec spec;
  spec.space = SpaceTag::lattice;
  spec.s = s;
  spec.d = window.dim();
  spec.window = std::move(window);
  return spec;
}

IntensitySpec IntensitySpec::euclidean(double s, Box window, double pad) {
  IntensitySpec spec;
  spec.space = SpaceTag::euclidean_window;
  spec.s = s;
  spec.d = window.dim();
  spec.window = std::move(window);
  spec.pad = pad;
  return spec;
}

std::vector<double> sample_poisson_flat(const IntensitySpec& spec, Rng& rng) {
  if (spec.space == SpaceTag::lattice) {
    throw std::invalid_argument("sample_poisson_flat: lattice spaces are not continuous");
  }
  const Box box = spec.sampled_box();
  const auto n = rng.poisson(spec.s * box.volume());
  std::vector<double> flat(n * spec.d);
  std::vector<double> width(spec.d);
  for (std::size_t k = 0; k < spec.d; ++k) width[k] = box.hi[k] - box.lo[k];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < spec.d; ++k) {
      flat[i * spec.d + k] = box.lo[k] + width[k] * rng.uniform();
    }
  }
  return flat;
}

PointConfiguration sample_poisson(const IntensitySpec& spec, const SeedSpec& seed) {
  spec.validate();
  Rng rng(seed);
  if (spec.space != SpaceTag::lattice) {
    const auto flat = sample_poisson_flat(spec, rng);
    return PointConfiguration::from_flat(spec.d, spec.space, flat);
  }

  // Odometer over the integer sites of the window, first coordinate slowest.
  std::vector<double> lo(spec.d), hi(spec.d), site(spec.d);
  for (std::size_t k = 0; k < spec.d; ++k) {
    lo[k] = std::ceil(spec.window.lo[k]);
    hi[k] = std::floor(spec.window.hi[k]);
  }
  site = lo;
  std::vector<double> flat;
  for (;;) {
    const auto m = rng.poisson(spec.s);
    for (std::uint64_t r = 0; r < m; ++r) flat.insert(flat.end(), site.begin(), site.end());
    std::size_t k = spec.d;
    while (k > 0) {
      --k;
      if (site[k] < hi[k]) {
        site[k] += 1.0;
        break;
      }
      site[k] = lo[k];
      if (k == 0) return PointConfiguration::from_flat(spec.d, spec.space, flat);
    }
  }
}

}  // namespace regstab
