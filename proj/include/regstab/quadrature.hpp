#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace regstab {

/// Composite Gauss-Legendre settings. Integrals over u = -log x are split
/// into panels of width `panel_width`, each carrying `nodes_per_axis` nodes.
struct QuadratureSpec {
  int nodes_per_axis = 16;
  double panel_width = 2.0;
  /// Extra log-units kept beyond the bulk of the integrand; 0 picks 40.
  double truncation = 0.0;
  std::size_t max_dim_tensor = 3;
  /// Step of the uniform u-grid used by the outer-integral engine.
  double grid_step = 0.05;

  void validate() const;
  double tail() const { return truncation > 0.0 ? truncation : 40.0; }
};

struct McSpec {
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t base_seed = 0x5eed;
  bool stratification = true;

  void validate() const;
};

/// A Monte Carlo (or exact, se = 0) estimate.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, cached per n.
const GaussRule& gauss_legendre(int n);

/// Nodes and weights of the composite rule on [a, b].
void composite_rule(double a, double b, const QuadratureSpec& spec,
                    std::vector<double>& nodes, std::vector<double>& weights);

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec);

/// Pairwise summation; the result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

/// Running mean / variance accumulator (Welford).
class MeanAccumulator {
 public:
  void add(double v) {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  Estimate estimate() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Monte Carlo mean of fn over the unit cube [0,1)^dim. With stratification
/// the first coordinate is split into n/2 strata holding two points each and
/// the standard error comes from the within-stratum differences.
Estimate mc_integrate(std::size_t dim, const McSpec& mc,
                      const std::function<double(std::span<const double>)>& fn);

}  // namespace regstab
