#include "regstab/quadrature.hpp"

#include "regstab/rng.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace regstab {

void QuadratureSpec::validate() const {
  if (nodes_per_axis < 2) throw std::invalid_argument("nodes_per_axis must be >= 2");
  if (!(panel_width > 0.0)) throw std::invalid_argument("panel_width must be > 0");
  if (truncation < 0.0 || !std::isfinite(truncation)) {
    throw std::invalid_argument("truncation must be >= 0");
  }
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be > 0");
}

void McSpec::validate() const {
  if (n_samples < 1000) throw std::invalid_argument("n_samples must be >= 1000");
}

Estimate MeanAccumulator::estimate() const {
  return {mean_, n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0};
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

void composite_rule(double a, double b, const QuadratureSpec& spec,
                    std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  if (!(b > a)) return;
  const auto& rule = gauss_legendre(spec.nodes_per_axis);
  const auto panels = static_cast<int>(std::ceil((b - a) / spec.panel_width));
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      nodes.push_back(mid + 0.5 * width * rule.nodes[k]);
      weights.push_back(0.5 * width * rule.weights[k]);
    }
  }
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  std::vector<double> nodes, weights;
  composite_rule(a, b, spec, nodes, weights);
  std::vector<double> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = weights[i] * f(nodes[i]);
  return pairwise_sum(terms);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate mc_integrate(std::size_t dim, const McSpec& mc,
                      const std::function<double(std::span<const double>)>& fn) {
  if (mc.n_samples == 0) throw std::invalid_argument("mc_integrate: zero samples");
  Rng rng(SeedSpec{mc.base_seed, 0});
  std::vector<double> u(dim);
  auto draw = [&] {
    for (auto& c : u) c = rng.uniform();
  };
  if (!mc.stratification || mc.n_samples < 4 || dim == 0) {
    MeanAccumulator acc;
    for (std::uint64_t i = 0; i < mc.n_samples; ++i) {
      draw();
      acc.add(fn(u));
    }
    return acc.estimate();
  }
  const std::uint64_t strata = mc.n_samples / 2;
  const double width = 1.0 / static_cast<double>(strata);
  std::vector<double> means(strata);
  double var = 0.0;
  for (std::uint64_t k = 0; k < strata; ++k) {
    draw();
    u[0] = (static_cast<double>(k) + u[0]) * width;
    const double a = fn(u);
    draw();
    u[0] = (static_cast<double>(k) + u[0]) * width;
    const double b = fn(u);
    means[k] = 0.5 * (a + b);
    var += 0.25 * (a - b) * (a - b);
  }
  const double n = static_cast<double>(strata);
  return {pairwise_sum(means) / n, std::sqrt(var) / n};
}

}  // namespace regstab
