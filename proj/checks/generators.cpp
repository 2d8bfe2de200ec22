#include "generators.hpp"

#include <algorithm>
#include <cmath>

namespace regstab::gen {

SpaceTag space_of(const ScoreModel& model) {
  switch (model.tag) {
    case ModelTag::minimal:
      return SpaceTag::cube;
    case ModelTag::lattice_isolated:
      return SpaceTag::lattice;
    case ModelTag::rgg_isolated:
      return SpaceTag::euclidean_window;
  }
  return SpaceTag::cube;
}

ScoreModel exact_model(ModelTag tag, std::size_t d, bool strict_fault) {
  switch (tag) {
    case ModelTag::minimal: {
      auto m = minimal_model(50.0, d);
      m.strict_dominance_fault = strict_fault;
      return m;
    }
    case ModelTag::lattice_isolated:
      return lattice_model(
          [](std::span<const double> x) {
            if (std::fabs(x[0]) > 3.0 || std::fabs(x[1]) > 3.0) return 0.0;
            const int k = static_cast<int>(std::fabs(x[0]) + 2.0 * std::fabs(x[1])) % 7;
            return (1.0 + k) / 8.0;
          },
          Box::centered(2, 3.0));
    case ModelTag::rgg_isolated:
      return rgg_model(
          10.0, 2, 1.0,
          [](double r) {
            return r < 10.0 ? std::floor(8.0 * std::log(10.0 / std::max(r, 0.0625))) / 8.0 : 0.0;
          },
          10.0);
  }
  return minimal_model(50.0, d);
}

Point random_point(const ScoreModel& model, Rng& rng) {
  switch (model.tag) {
    case ModelTag::minimal: {
      std::vector<double> c(model.d);
      const bool coarse = rng.uniform() < 0.5;
      for (auto& v : c) v = coarse ? static_cast<double>(rng.below(9)) / 8.0 : rng.uniform();
      return Point(std::move(c));
    }
    case ModelTag::lattice_isolated:
      return Point{static_cast<double>(rng.below(9)) - 4.0, static_cast<double>(rng.below(9)) - 4.0};
    case ModelTag::rgg_isolated:
      return Point{(static_cast<double>(rng.below(25)) - 12.0) / 4.0,
                   (static_cast<double>(rng.below(25)) - 12.0) / 4.0};
  }
  return {};
}

PointConfiguration random_config(const ScoreModel& model, Rng& rng, std::size_t max_entries) {
  PointConfiguration config(model.d, space_of(model));
  const auto n = rng.below(max_entries + 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t m = rng.uniform() < 0.15 ? 2 : 1;
    config = add(config, random_point(model, rng), m);
  }
  return config;
}

std::vector<Point> expand(const PointConfiguration& config) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < config.entry_count(); ++i) {
    for (std::uint32_t k = 0; k < config.multiplicity(i); ++k) out.push_back(config.point(i));
  }
  return out;
}

PointConfiguration collect(const ScoreModel& model, const std::vector<Point>& points) {
  return PointConfiguration::from_points(model.d, space_of(model), points);
}

}  // namespace regstab::gen
