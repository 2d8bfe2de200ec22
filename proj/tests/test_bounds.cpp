#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "regstab/bounds.hpp"

using namespace regstab;

TEST_SUITE("bounds") {

TEST_CASE("c in one dimension is elementary") {
  const std::vector<double> y = {0.5};
  CHECK(c_alpha_s(y, 1.0, 2.0) == doctest::Approx(0.232544158).epsilon(1e-9));
  CHECK(c_alpha_s(y, 1.0, 2.0) == doctest::Approx(std::exp(-1.0) - std::exp(-2.0)));
}

TEST_CASE("c in two dimensions matches the Ein closed form") {
  for (double s : {1.0, 30.0, 1e3}) {
    for (const auto& y : std::vector<std::vector<double>>{{0.1, 0.7}, {0.01, 0.02}, {0.5, 0.5}}) {
      const double exact = oracle::c_alpha_s_d2(y[0], y[1], 0.25, s);
      CHECK(c_alpha_s(y, 0.25, s) == doctest::Approx(exact).epsilon(1e-9));
    }
  }
}

TEST_CASE("c in three dimensions matches inclusion-exclusion") {
  const std::vector<double> y = {0.05, 0.3, 0.6};
  const double exact = oracle::c_alpha_s_corners(y, 1.0, 50.0);
  CHECK(c_alpha_s(y, 1.0, 50.0) == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("Ein oracle") {
  CHECK(oracle::ein(100.0) == doctest::Approx(5.18238585).epsilon(1e-9));
  CHECK(oracle::ein(1e-3) == doctest::Approx(1e-3 - 0.25e-6).epsilon(1e-6));
}

TEST_CASE("mean of the minimal count") {
  CHECK(mean_minimal(1.0, 1) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(mean_minimal(100.0, 2) == doctest::Approx(5.18238585).epsilon(1e-8));
  // d = 3: s int exp(-s x1 x2 x3) = s * product_laplace(s, 3).
  CHECK(mean_minimal(200.0, 3) ==
        doctest::Approx(200.0 * oracle::product_laplace(200.0, 3)).epsilon(1e-6));
}

TEST_CASE("kappa, g and q for the lattice model") {
  const auto m = lattice_model(5);
  const std::vector<double> x = {0.0, 0.0};
  CHECK(kappa_s(m, x) == doctest::Approx(std::exp(-4.0)));
  CHECK(g_s(m, x) == doctest::Approx(4.0 * std::exp(-0.08)));
  CHECK(g_s(m, x) == doctest::Approx(3.69249).epsilon(1e-5));
  CHECK(G_s(m, x) == doctest::Approx(1.0 + std::pow(4.0 * std::exp(-0.08), 5.0)));
  CHECK(q_s(m, x, std::vector<double>{1.0, 1.0}) == doctest::Approx(2.0 * std::exp(-4.0)));
  CHECK(q_s(m, x, std::vector<double>{2.0, 0.0}) == doctest::Approx(std::exp(-4.0)));
  CHECK(q_s(m, x, std::vector<double>{3.0, 0.0}) == 0.0);
  CHECK(q_kind(m) == ValueKind::value);
}

TEST_CASE("kappa and q for the minimal model") {
  const auto m = minimal_model(10.0, 2);
  const std::vector<double> x = {0.1, 1.0};
  CHECK(kappa_s(m, x) == doctest::Approx(std::exp(-1.0)));
  const std::vector<double> a = {0.2, 0.5}, b = {0.4, 0.3};
  CHECK(q_s(m, a, b) == doctest::Approx(c_alpha_s(std::vector<double>{0.4, 0.5}, 1.0, 10.0)));
}

TEST_CASE("rgg quantities are bounds") {
  const auto m = rgg_model(20.0, 2, rgg_log_regime_radius(20.0, 2));
  CHECK(kappa_kind(m) == ValueKind::bound);
  CHECK(q_kind(m) == ValueKind::bound);
}

TEST_CASE("bound assembly with unit terms") {
  const auto m = minimal_model(100.0, 2);
  OuterTerms t;
  t.int_f_beta_sq = {1.0, 0.0};
  t.int_f_2beta = {1.0, 0.0};
  t.int_kg_G = {1.0, 0.0};
  const auto r = assemble_bound(m, t, 1.0);
  CHECK(r.dW_norm == doctest::Approx(2.0));
  CHECK(r.dK_norm == doctest::Approx(6.0));
  CHECK_THROWS(assemble_bound(m, t, 0.0));
  CHECK(r.to_json().find("\"dK_norm\"") != std::string::npos);
}

TEST_CASE("lattice variance is exact") {
  // One weighted site: H = N_0 1{no neighbour}, N_0 ~ Poisson(1).
  const auto m = lattice_model(0);
  const double v = variance_lattice_exact(m);
  const double single = 2.0 * std::exp(-4.0) - std::exp(-8.0);
  CHECK(v == doctest::Approx(single));
}

TEST_CASE("rgg weight moments scale as s^3") {
  const auto m = rgg_model(10.0, 2, 0.5);
  // s * 2 pi s^2 int_0^1 log(1/r)^i r dr = s^3 * 2 pi * i! / 2^{i+1}.
  CHECK(rgg_weight_moment(m, 1) == doctest::Approx(1000.0 * M_PI / 2.0).epsilon(1e-6));
  CHECK(rgg_weight_moment(m, 2) == doctest::Approx(1000.0 * M_PI / 2.0).epsilon(1e-6));
}

TEST_CASE("c corner values and scaling") {
  CHECK(c_alpha_s(std::vector<double>{1.0, 1.0}, 1.0, 50.0) == 0.0);
  CHECK(c_alpha_s(std::vector<double>{1.0, 1.0, 1.0}, 1.0, 50.0) == 0.0);
  const std::vector<double> y = {0.02, 0.3};
  for (double s : {5.0, 100.0, 1e4}) {
    CHECK(c_alpha_s(y, 2.0, s) == doctest::Approx(0.5 * c_alpha_s(y, 1.0, 2.0 * s)).epsilon(1e-9));
  }
}

TEST_CASE("kappa for the minimal model") {
  const auto m = minimal_model(10.0, 2);
  CHECK(kappa_s(m, std::vector<double>{0.0, 0.7}) == 1.0);
  CHECK(kappa_s(m, std::vector<double>{0.5, 0.2}) == doctest::Approx(0.367879).epsilon(1e-6));
}

TEST_CASE("g and G at trivial points") {
  const auto m = minimal_model(100.0, 2);
  const std::vector<double> top = {1.0, 1.0};
  CHECK(g_s(m, top) == 0.0);
  CHECK(G_s(m, top) == 1.0);
  const auto r = rgg_model(10.0, 2, 0.5);
  CHECK(G_s(r, std::vector<double>{20.0, 0.0}) == 0.0);  // outside the weight support
}

TEST_CASE("q is symmetric and vanishes at the top corner") {
  const auto m = minimal_model(100.0, 2);
  const std::vector<double> a = {0.3, 0.05}, b = {0.1, 0.4};
  CHECK(q_s(m, a, b) == q_s(m, b, a));
  CHECK(q_s(m, std::vector<double>{1.0, 0.2}, std::vector<double>{0.1, 1.0}) == 0.0);
}

TEST_CASE("f vanishes at the top corner") {
  const auto m = minimal_model(100.0, 2);
  const auto f = f_alpha(m, std::vector<double>{1.0, 1.0}, m.beta());
  CHECK(f.f1.value == 0.0);
}

TEST_CASE("mean of the minimal count for tiny s") {
  CHECK(mean_minimal(1e-6, 2) < 2e-6);
  CHECK(mean_minimal(1e-6, 2) > 0.0);
}

TEST_CASE("zero terms give zero bounds") {
  const auto r = assemble_bound(minimal_model(100.0, 2), OuterTerms{}, 3.0);
  CHECK(r.dW_norm == 0.0);
  CHECK(r.dK_norm == 0.0);
}

TEST_CASE("zero-weight lattice has zero outer integrals") {
  const auto m = lattice_model([](std::span<const double>) { return 0.0; }, Box::centered(2, 3.0));
  const auto t = outer_integrals(m);
  CHECK(t.int_f_beta_sq.value == 0.0);
  CHECK(t.int_f_2beta.value == 0.0);
  CHECK(t.int_kg_G.value == 0.0);
}

TEST_CASE("lattice G term grows with the weight mass") {
  std::vector<double> ratios;
  for (int n : {5, 10, 20}) {
    const double w2 = (2.0 * n + 1) * (2.0 * n + 1);
    ratios.push_back(outer_integrals(lattice_model(n)).int_kg_G.value / w2);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK((*hi - *lo) / *lo <= 0.05);
}

TEST_CASE("minimal outer integrals by grid are finite and positive") {
  const auto t = minimal_outer_grid(1000.0, 1.0);
  for (const auto& e : {t.int_f_beta_sq, t.int_f_2beta, t.int_kg_G}) {
    CHECK(std::isfinite(e.value));
    CHECK(e.value > 0.0);
  }
}

}
