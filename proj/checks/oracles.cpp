#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "regstab/point.hpp"

namespace regstab::oracle {

std::size_t brute_force_minimal_count(std::span<const double> flat, std::size_t d) {
  const std::size_t n = flat.size() / d;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool minimal = true;
    for (std::size_t j = 0; j < n && minimal; ++j) {
      if (j != i && dominates(flat.subspan(i * d, d), flat.subspan(j * d, d))) minimal = false;
    }
    count += minimal;
  }
  return count;
}

double ein(double x) {
  if (x < 0.0) throw std::domain_error("ein: negative argument");
  if (x <= 2.0) {
    double term = x, sum = x;
    for (int k = 2; k < 60; ++k) {
      term *= -x / k;
      sum += term / k;
    }
    return sum;
  }
  // E1 by its continued fraction (modified Lentz).
  const double tiny = 1e-300;
  double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::numbers::egamma + std::log(x) + h * std::exp(-x);
}

double c_alpha_s_d2(double y1, double y2, double alpha, double s) {
  const double a = alpha * s;
  return (ein(a) - ein(a * y1) - ein(a * y2) + ein(a * y1 * y2)) / alpha;
}

double product_laplace(double t, std::size_t d) {
  if (d == 0) throw std::invalid_argument("product_laplace: d >= 1");
  double fact = 1.0;
  for (std::size_t k = 2; k < d; ++k) fact *= static_cast<double>(k);
  const double upper = std::log(std::max(t, 1.0)) + 60.0;
  const int n = 200000;
  const double h = upper / n;
  auto f = [&](double g) {
    return std::pow(g, static_cast<double>(d - 1)) * std::exp(-g - t * std::exp(-g)) / fact;
  };
  double sum = f(0.0) + f(upper);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return sum * h / 3.0;
}

double c_alpha_s_corners(std::span<const double> y, double alpha, double s) {
  const std::size_t d = y.size();
  double total = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    double v = 1.0;
    int bits = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask >> i & 1U) {
        v *= y[i];
        ++bits;
      }
    }
    if (v == 0.0) continue;
    total += (bits % 2 ? -1.0 : 1.0) * v * product_laplace(alpha * s * v, d);
  }
  return s * total;
}

LatticeEnumerator::LatticeEnumerator(const ScoreModel& model, const IntensitySpec& intensity)
    : model_(model), intensity_(intensity) {
  if (model.tag != ModelTag::lattice_isolated || intensity.space != SpaceTag::lattice) {
    throw std::invalid_argument("LatticeEnumerator needs the lattice model");
  }
}

namespace {

double l1(const Point& a, const Point& b) {
  return std::fabs(a[0] - b[0]) + std::fabs(a[1] - b[1]);
}

}  // namespace

double LatticeEnumerator::p_first(const Point& x) const { return enumerate({x}); }

double LatticeEnumerator::p_second(const Point& x1, const Point& x2) const {
  // No score has both points within reach once they are more than two steps apart.
  if (l1(x1, x2) > 2.0) return 0.0;
  return enumerate({x1, x2});
}

double LatticeEnumerator::enumerate(const std::vector<Point>& added) const {
  // Sites within two steps of an added point; only their occupancy matters.
  std::vector<Point> sites;
  for (const auto& a : added) {
    for (int dx = -2; dx <= 2; ++dx) {
      for (int dy = -2; dy <= 2; ++dy) {
        if (std::abs(dx) + std::abs(dy) > 2) continue;
        Point p{a[0] + dx, a[1] + dy};
        if (std::find(sites.begin(), sites.end(), p) == sites.end()) sites.push_back(p);
      }
    }
  }
  const std::size_t n = sites.size();
  auto index_of = [&](const Point& p) -> int {
    const auto it = std::find(sites.begin(), sites.end(), p);
    return it == sites.end() ? -1 : static_cast<int>(it - sites.begin());
  };

  std::vector<int> free_sites;
  for (std::size_t i = 0; i < n; ++i) {
    if (intensity_.window.contains(sites[i].coords())) free_sites.push_back(static_cast<int>(i));
  }

  // Scores that can change: sites within one step of an added point.
  struct Scored {
    int index;
    double weight;
    std::vector<int> neighbours;
  };
  std::vector<Scored> scored;
  for (std::size_t i = 0; i < n; ++i) {
    bool near = false;
    for (const auto& a : added) near = near || l1(sites[i], a) <= 1.0;
    const double w = model_.weight(sites[i].coords());
    if (!near || w == 0.0) continue;
    Scored sc{static_cast<int>(i), w, {}};
    const double steps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& st : steps) sc.neighbours.push_back(index_of(Point{sites[i][0] + st[0], sites[i][1] + st[1]}));
    scored.push_back(std::move(sc));
  }

  std::vector<int> added_index;
  for (const auto& a : added) added_index.push_back(index_of(a));

  const double occupied = -std::expm1(-intensity_.s);
  std::vector<int> count(n);
  auto local_h = [&]() {
    double h = 0.0;
    for (const auto& sc : scored) {
      if (count[sc.index] == 0) continue;
      bool isolated = true;
      for (int j : sc.neighbours) isolated = isolated && count[j] == 0;
      if (isolated) h += count[sc.index] * sc.weight;
    }
    return h;
  };

  double prob = 0.0;
  const std::size_t k = free_sites.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::fill(count.begin(), count.end(), 0);
    int occ = 0;
    for (std::size_t b = 0; b < k; ++b) {
      if (mask >> b & 1U) {
        count[free_sites[b]] = 1;
        ++occ;
      }
    }
    double diff;
    if (added.size() == 1) {
      const double h0 = local_h();
      ++count[added_index[0]];
      diff = local_h() - h0;
    } else {
      const double h0 = local_h();
      ++count[added_index[0]];
      const double h1 = local_h();
      ++count[added_index[1]];
      const double h12 = local_h();
      --count[added_index[0]];
      const double h2 = local_h();
      diff = (h12 - h1) - (h2 - h0);
    }
    if (std::fabs(diff) > 1e-12) {
      prob += std::pow(occupied, occ) * std::pow(1.0 - occupied, static_cast<double>(k - occ));
    }
  }
  return prob;
}

}  // namespace regstab::oracle
