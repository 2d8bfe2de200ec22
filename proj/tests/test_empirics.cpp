#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "regstab/bounds.hpp"
#include "regstab/empirics.hpp"

using namespace regstab;

TEST_SUITE("empirics") {

TEST_CASE("normal helpers") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
  CHECK(normal_cdf_integral(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)));
  for (double p : {1e-12, 0.01, 0.3, 0.5, 0.975, 1.0 - 1e-9}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("distances of a single point") {
  const std::vector<double> zero = {0.0};
  CHECK(ks_distance(zero) == doctest::Approx(0.5));
  CHECK(wasserstein1(zero) == doctest::Approx(std::sqrt(2.0 / M_PI)));
}

TEST_CASE("distances of a quantile sample are small") {
  std::vector<double> q;
  const int n = 10000;
  for (int i = 0; i < n; ++i) q.push_back(normal_quantile((i + 0.5) / n));
  CHECK(ks_distance(q) <= 0.5 / n + 1e-9);
  CHECK(wasserstein1(q) < 5e-4);
}

TEST_CASE("reference normalization") {
  const std::vector<double> x = {1.0, 3.0};
  const auto [dk, dw] = distances_with_reference(x, 2.0, 1.0);
  const std::vector<double> z = {-1.0, 1.0};
  CHECK(dk == doctest::Approx(ks_distance(z)));
  CHECK(dw == doctest::Approx(wasserstein1(z)));
}

TEST_CASE("scaling fit recovers exponents") {
  std::vector<std::pair<double, double>> pts, flat;
  for (double s : {1e2, 1e3, 1e4, 1e5}) {
    pts.emplace_back(s, 3.0 * std::pow(std::log(s), 2.0));
    flat.emplace_back(s, 7.0);
  }
  const auto a = scaling_fit(pts);
  CHECK(a.gamma == doctest::Approx(2.0));
  CHECK(a.C == doctest::Approx(3.0));
  CHECK(a.r_squared == doctest::Approx(1.0));
  CHECK(scaling_fit(flat).gamma == doctest::Approx(0.0));
  pts.pop_back();
  CHECK_THROWS(scaling_fit(pts));
}

TEST_CASE("ensemble summary and csv") {
  const auto ens = run_ensemble(minimal_model(100.0, 2), IntensitySpec::cube(100.0, 2), 50, 3);
  CHECK(ens.samples.size() == 50);
  CHECK(ens.seed_of(4) == SeedSpec{3, 4}.replicate_seed());
  std::ostringstream os;
  ens.write_samples_csv(os);
  const auto text = os.str();
  CHECK(text.rfind("replicate,seed,statistic,point_count\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 51);
  CHECK(ens.summary_json().find("\"dK_emp\"") != std::string::npos);
  CHECK_THROWS(run_ensemble(minimal_model(100.0, 2), IntensitySpec::cube(100.0, 2), 1, 3));
}

TEST_CASE("degenerate ensembles report null distances") {
  // A lattice window that carries no weight gives H = 0 every time.
  auto m = lattice_model(
      [](std::span<const double>) { return 0.0; }, Box::centered(2, 1.0));
  const auto ens = run_ensemble(m, default_intensity(m), 10, 1);
  CHECK(ens.degenerate);
  CHECK(ens.summary_json().find("\"dK_emp\": null") != std::string::npos);
}

TEST_CASE("Mecke variance against simulation at s = 100") {
  const double v = variance_mecke_minimal(100.0);
  CHECK(v == doctest::Approx(3.5576).epsilon(1e-3));
  const auto ens = run_ensemble(minimal_model(100.0, 2), IntensitySpec::cube(100.0, 2), 4000, 21);
  CHECK(std::fabs(ens.var - v) <= 4.0 * ens.se_var);
  CHECK(std::fabs(ens.mean - mean_minimal(100.0, 2)) <= 4.0 * ens.se_mean);
  CHECK_THROWS(variance_mecke_minimal(100.0, 3));
}

TEST_CASE("zero intensity ensemble is degenerate") {
  const auto ens = run_ensemble(minimal_model(0.0, 2), IntensitySpec::cube(0.0, 2), 2, 1);
  CHECK(ens.samples == std::vector<double>{0.0, 0.0});
  CHECK(ens.degenerate);
  CHECK(ens.normalized.empty());
}

TEST_CASE("lattice ensemble mean is the exact sum") {
  const auto m = lattice_model(20);
  const auto ens = run_ensemble(m, default_intensity(m), 1000, 12);
  CHECK(std::fabs(ens.mean - std::exp(-4.0) * 41.0 * 41.0) <= 4.0 * ens.se_mean);
}

TEST_CASE("ks of i.i.d. normal samples stays under the DKW level") {
  const std::size_t n = 100000;
  int failures = 0;
  for (std::uint64_t run = 0; run < 20; ++run) {
    Rng rng(SeedSpec{77, run});
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    failures += ks_distance(x) > 1.95 / std::sqrt(static_cast<double>(n));
  }
  CHECK(failures == 0);
}

TEST_CASE("shifting the sample moves dW by at most the shift") {
  Rng rng(SeedSpec{78, 0});
  std::vector<double> x(2000);
  for (auto& v : x) v = rng.normal();
  const double base = wasserstein1(x);
  for (int k = 0; k < 20; ++k) {
    const double c = rng.uniform(-2.0, 2.0);
    std::vector<double> y = x;
    for (auto& v : y) v += c;
    CHECK(std::fabs(wasserstein1(y) - base) <= std::fabs(c) + 1e-12);
  }
}

TEST_CASE("Mecke variance for small s and its growth") {
  CHECK(std::fabs(variance_mecke_minimal(1e-4)) < 1e-3);
  std::vector<double> per_log;
  for (double s : {1e2, 1e3, 1e4}) per_log.push_back(variance_mecke_minimal(s) / std::log(s));
  const auto [lo, hi] = std::minmax_element(per_log.begin(), per_log.end());
  CHECK((*hi - *lo) / *lo <= 0.25);
}

TEST_CASE("mean of the minimal count at s = 1000 against simulation") {
  const auto ens = run_ensemble(minimal_model(1e3, 2), IntensitySpec::cube(1e3, 2), 1000, 31);
  CHECK(std::fabs(ens.mean - mean_minimal(1e3, 2)) <= 4.0 * ens.se_mean);
}

}
