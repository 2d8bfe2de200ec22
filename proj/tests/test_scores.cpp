#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "regstab/sampling.hpp"
#include "regstab/scores.hpp"
#include "regstab/skyline.hpp"

using namespace regstab;

namespace {

PointConfiguration cube_config(std::initializer_list<double> flat) {
  const std::vector<double> v(flat);
  return PointConfiguration::from_flat(2, SpaceTag::cube, v);
}

}  // namespace

TEST_SUITE("scores") {

TEST_CASE("minimal points of a small configuration") {
  const auto m = minimal_model(10.0, 2);
  const auto c = cube_config({0.2, 0.8, 0.5, 0.5, 0.6, 0.6, 0.9, 0.1});
  CHECK(score(m, Point{0.2, 0.8}, c) == 1.0);
  CHECK(score(m, Point{0.5, 0.5}, c) == 1.0);
  CHECK(score(m, Point{0.6, 0.6}, c) == 0.0);
  CHECK(statistic(m, c).value == 3.0);
  CHECK(statistic_by_scores(m, c) == 3.0);
}

TEST_CASE("duplicates are never minimal") {
  const auto m = minimal_model(10.0, 2);
  const auto c = cube_config({0.3, 0.3, 0.3, 0.3, 0.1, 0.9});
  CHECK(score(m, Point{0.3, 0.3}, c) == 0.0);
  CHECK(statistic(m, c).value == 1.0);
  // The region only looks at other locations, so it stays the full box.
  CHECK(region(m, Point{0.3, 0.3}, c) == RegionDescriptor::box_to_origin(Point{0.3, 0.3}));
}

TEST_CASE("minimal region is the box to the origin") {
  const auto m = minimal_model(10.0, 2);
  const auto c = cube_config({0.4, 0.7});
  const auto r = region(m, Point{0.4, 0.7}, c);
  CHECK(r.kind() == RegionDescriptor::Kind::box_to_origin);
  CHECK(r.contains(Point{0.4, 0.0}));
  CHECK_FALSE(r.contains(Point{0.41, 0.1}));
}

TEST_CASE("minimal rate is s times the volume of the box") {
  const auto m = minimal_model(10.0, 2);
  CHECK(rate(m, Point{0.5, 0.5}, Point{0.2, 0.4}) == doctest::Approx(2.5));
  CHECK(std::isinf(rate(m, Point{0.5, 0.5}, Point{0.8, 0.4})));
}

TEST_CASE("lattice isolation with a weight") {
  const auto m = lattice_model(2);
  const std::vector<double> flat = {0, 0, 1, 0, 2, 2, 5, 5};
  const auto c = PointConfiguration::from_flat(2, SpaceTag::lattice, flat);
  CHECK(score(m, Point{0, 0}, c) == 0.0);
  CHECK(score(m, Point{2, 2}, c) == 1.0);
  CHECK(score(m, Point{5, 5}, c) == 0.0);  // outside the weight support
  CHECK(statistic(m, c).value == 1.0);
  const auto r = region(m, Point{2, 2}, c);
  CHECK(r.contains(Point{2, 3}));
  CHECK_FALSE(r.contains(Point{3, 3}));
}

TEST_CASE("rgg isolation uses the radius and the log weight") {
  const auto m = rgg_model(100.0, 2, 0.5);
  const std::vector<double> flat = {1.0, 0.0, 1.4, 0.0, -3.0, 0.0};
  const auto c = PointConfiguration::from_flat(2, SpaceTag::euclidean_window, flat);
  CHECK(score(m, Point{1.0, 0.0}, c) == 0.0);
  CHECK(score(m, Point{-3.0, 0.0}, c) == doctest::Approx(std::log(100.0 / 3.0)));
}

TEST_CASE("model parameters") {
  const auto m = minimal_model(1.0, 2, 1.0);
  CHECK(m.zeta() == doctest::Approx(1.0 / 50.0));
  CHECK(m.beta() == doctest::Approx(1.0 / 36.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
  const double rho = rgg_log_regime_radius(50.0, 2);
  CHECK(50.0 * M_PI * rho * rho == doctest::Approx(std::log(50.0)));
  CHECK(parse_model_tag("lattice") == ModelTag::lattice_isolated);
  CHECK_THROWS(parse_model_tag("voronoi"));
  CHECK_THROWS(minimal_model(10.0, 2, 1.5).validate());
}

TEST_CASE("fast skyline agrees with brute force in d = 1..5") {
  for (std::size_t d = 1; d <= 5; ++d) {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      Rng rng(SeedSpec{d, rep});
      const auto n = 50 + rng.below(300);
      std::vector<double> flat(n * d);
      for (auto& v : flat) v = static_cast<double>(rng.below(16)) / 16.0;  // many ties
      CHECK(count_minimal_fast(flat, d) == oracle::brute_force_minimal_count(flat, d));
    }
  }
}

TEST_CASE("strict fault changes the score of tied points") {
  auto m = minimal_model(10.0, 2);
  m.strict_dominance_fault = true;
  const auto c = cube_config({0.5, 0.2, 0.5, 0.6});
  CHECK(score(m, Point{0.5, 0.6}, c) == 1.0);
  m.strict_dominance_fault = false;
  CHECK(score(m, Point{0.5, 0.6}, c) == 0.0);
}

TEST_CASE("small minimal statistics") {
  const auto m = minimal_model(10.0, 2);
  CHECK(statistic(m, PointConfiguration(2, SpaceTag::cube)).value == 0.0);
  CHECK(statistic(m, cube_config({0.1, 0.9, 0.5, 0.5, 0.9, 0.1})).value == 3.0);
  CHECK(statistic(m, cube_config({0.1, 0.1, 0.2, 0.2, 0.3, 0.3})).value == 1.0);
  const auto single = cube_config({0.5, 0.5});
  CHECK(score(m, Point{0.5, 0.5}, single) == 1.0);
  const auto pair = cube_config({0.2, 0.2, 0.5, 0.5});
  CHECK(score(m, Point{0.5, 0.5}, pair) == 0.0);
  CHECK(region(m, Point{0.5, 0.5}, pair).is_empty());
}

TEST_CASE("lattice score and region for an isolated site") {
  const auto m = lattice_model(10);
  const std::vector<double> flat = {0, 0, 5, 5};
  const auto c = PointConfiguration::from_flat(2, SpaceTag::lattice, flat);
  CHECK(score(m, Point{0, 0}, c) == 1.0);
  CHECK(region(m, Point{0, 0}, c) == RegionDescriptor::neighbor_set(Point{0, 0}));
  CHECK(rate(m, Point{0, 0}, Point{0, -1}) == doctest::Approx(4.0));
}

TEST_CASE("minimal rate at the centre") {
  const auto m = minimal_model(10.0, 2);
  CHECK(rate(m, Point{0.5, 0.5}, Point{0.1, 0.1}) == doctest::Approx(10.0 * 0.25));
}

TEST_CASE("skyline corner cases") {
  const std::vector<double> one = {0.4, 0.6, 0.1};
  CHECK(count_minimal_fast(one, 3) == 1);
  for (std::size_t d = 1; d <= 4; ++d) {
    std::vector<double> copies;
    for (int k = 0; k < 5; ++k) {
      for (std::size_t j = 0; j < d; ++j) copies.push_back(0.25 + 0.1 * j);
    }
    CHECK(count_minimal_fast(copies, d) == 0);
  }
  for (std::size_t d = 2; d <= 4; ++d) {
    Rng rng(SeedSpec{40, d});
    std::vector<double> flat(200 * d);
    for (auto& v : flat) v = rng.uniform();
    CHECK(count_minimal_fast(flat, d) == oracle::brute_force_minimal_count(flat, d));
  }
}

}
