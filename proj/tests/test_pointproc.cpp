#include <cmath>
#include <sstream>

#include "doctest.h"
#include "regstab/configuration.hpp"
#include "regstab/rng.hpp"
#include "regstab/sampling.hpp"

using namespace regstab;

TEST_SUITE("pointproc") {

TEST_CASE("replicate seed derivation is frozen") {
  CHECK(SeedSpec{0, 0}.replicate_seed() == splitmix64_mix(kGoldenGamma));
  CHECK(SeedSpec{7, 3}.replicate_seed() == splitmix64_mix(7ULL ^ (kGoldenGamma * 4)));
  CHECK(SeedSpec{7, 3}.replicate_seed() != SeedSpec{7, 4}.replicate_seed());
}

TEST_CASE("coincident points merge into multiplicities") {
  const std::vector<double> flat = {0.5, 0.5, 0.25, 0.75, 0.5, 0.5};
  const auto c = PointConfiguration::from_flat(2, SpaceTag::cube, flat);
  CHECK(c.entry_count() == 2);
  CHECK(c.mass() == 3);
  CHECK(c.multiplicity_of(Point{0.5, 0.5}.coords()) == 2);
  CHECK(c.point(0) == Point{0.25, 0.75});  // lexicographic order
}

TEST_CASE("add, without and leq") {
  PointConfiguration c(2, SpaceTag::cube);
  const auto a = add(c, Point{0.1, 0.2});
  const auto b = add(a, Point{0.1, 0.2}, 2);
  CHECK(b.mass() == 3);
  CHECK(leq(a, b));
  CHECK_FALSE(leq(b, a));
  CHECK(b.without(Point{0.1, 0.2}, 2) == a);
  CHECK(leq(c, a));
}

TEST_CASE("restrict keeps multiplicities inside the region only") {
  const std::vector<double> flat = {0.1, 0.1, 0.1, 0.1, 0.6, 0.2, 0.3, 0.9};
  const auto c = PointConfiguration::from_flat(2, SpaceTag::cube, flat);
  const auto r = restrict(c, RegionDescriptor::box_to_origin(Point{0.6, 0.5}));
  CHECK(r.mass() == 3);
  CHECK(r.multiplicity_of(Point{0.1, 0.1}.coords()) == 2);
  CHECK(r.contains(Point{0.6, 0.2}));  // closed box
  CHECK_FALSE(r.contains(Point{0.3, 0.9}));
  CHECK(restrict(c, RegionDescriptor::empty()).empty());
  CHECK(restrict(c, RegionDescriptor::whole_space()) == c);
}

TEST_CASE("csv round trip") {
  const std::vector<double> flat = {0.125, 0.5, 0.125, 0.5, 0.75, 0.0625};
  const auto c = PointConfiguration::from_flat(2, SpaceTag::cube, flat);
  std::stringstream ss;
  write_csv(ss, c);
  CHECK(ss.str().rfind("coord_1,coord_2,multiplicity\n", 0) == 0);
  CHECK(read_csv(ss, SpaceTag::cube) == c);
}

TEST_CASE("sampling is a pure function of the seed") {
  const auto spec = IntensitySpec::cube(200.0, 3);
  const auto a = sample_poisson(spec, {11, 5});
  const auto b = sample_poisson(spec, {11, 5});
  const auto c = sample_poisson(spec, {11, 6});
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (std::size_t i = 0; i < a.entry_count(); ++i) {
    CHECK(Box::unit(3).contains(a.coords(i)));
  }
}

TEST_CASE("lattice sampling stays on integer sites of the window") {
  const auto spec = IntensitySpec::lattice(2.0, Box::centered(2, 3.0));
  CHECK(spec.base_measure() == doctest::Approx(49.0));
  const auto c = sample_poisson(spec, {3, 0});
  for (std::size_t i = 0; i < c.entry_count(); ++i) {
    for (double v : c.coords(i)) {
      CHECK(v == std::round(v));
      CHECK(std::fabs(v) <= 3.0);
    }
  }
}

TEST_CASE("euclidean window is padded") {
  const auto spec = IntensitySpec::euclidean(1.0, Box::centered(2, 1.0), 0.5);
  CHECK(spec.base_measure() == doctest::Approx(9.0));
  CHECK(spec.sampled_box().hi[0] == doctest::Approx(1.5));
}

TEST_CASE("poisson draws have the right mean on both branches") {
  Rng rng(SeedSpec{99, 0});
  for (double mean : {0.5, 3.0, 25.0, 400.0}) {
    double sum = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(mean));
    CHECK(sum / n == doctest::Approx(mean).epsilon(5.0 * std::sqrt(mean / n) / mean));
  }
}

TEST_CASE("invalid intensities are rejected") {
  CHECK_THROWS(IntensitySpec::cube(-1.0, 2).validate());
  CHECK_THROWS(IntensitySpec::cube(1.0, 0).validate());
}

TEST_CASE("zero intensity gives the empty configuration") {
  CHECK(sample_poisson(IntensitySpec::cube(0.0, 2), {1, 0}).empty());
  CHECK(sample_poisson(IntensitySpec::lattice(0.0, Box::centered(2, 2.0)), {1, 0}).empty());
  CHECK(sample_poisson(IntensitySpec::euclidean(0.0, Box::centered(2, 1.0), 0.5), {1, 0}).empty());
}

TEST_CASE("single-site lattice multiplicities are Poisson(1)") {
  const auto spec = IntensitySpec::lattice(1.0, Box::centered(2, 0.0));
  std::vector<double> counts(8, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto c = sample_poisson(spec, {5, static_cast<std::uint64_t>(i)});
    counts[std::min<std::size_t>(c.mass(), 7)] += 1.0;
  }
  double pk = std::exp(-1.0), tail = 1.0;
  for (int k = 0; k < 7; ++k) {
    const double se = std::sqrt(pk * (1.0 - pk) / n);
    CHECK(std::fabs(counts[k] / n - pk) <= 4.0 * se);
    tail -= pk;
    pk /= (k + 1);
  }
  CHECK(std::fabs(counts[7] / n - tail) <= 4.0 * std::sqrt(tail / n) + 1e-12);
}

TEST_CASE("cube point counts have mean s") {
  const auto spec = IntensitySpec::cube(100.0, 2);
  double total = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    total += static_cast<double>(sample_poisson(spec, {8, static_cast<std::uint64_t>(i)}).mass());
  }
  CHECK(std::fabs(total / n - 100.0) <= 3.0 * std::sqrt(100.0 / n));
}

TEST_CASE("add merges multiplicities") {
  const Point x{0.2, 0.3}, y{0.7, 0.8};
  const auto one = add(PointConfiguration(2, SpaceTag::cube), x);
  CHECK(one.mass() == 1);
  CHECK(add(one, x).multiplicity_of(x.coords()) == 2);
  const auto mixed = add(one, y, 2);
  CHECK(mixed.multiplicity_of(x.coords()) == 1);
  CHECK(mixed.multiplicity_of(y.coords()) == 2);
}

TEST_CASE("restrict and leq on small configurations") {
  const Point x{0.2, 0.3}, y{0.7, 0.8};
  const auto m = add(add(PointConfiguration(2, SpaceTag::cube), x), y);
  const auto r = restrict(m, RegionDescriptor::box_to_origin(Point{0.5, 0.5}));
  CHECK(r == add(PointConfiguration(2, SpaceTag::cube), x));
  CHECK(leq(PointConfiguration(2, SpaceTag::cube), m));
  CHECK_FALSE(leq(add(PointConfiguration(2, SpaceTag::cube), x, 2),
                  add(PointConfiguration(2, SpaceTag::cube), x)));
  CHECK(leq(add(PointConfiguration(2, SpaceTag::cube), x), m));
}

}
