#include "regstab/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "regstab/bounds.hpp"
#include "regstab/parallel.hpp"
#include "regstab/skyline.hpp"

namespace regstab {

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

double normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf_integral(double t) { return t * normal_cdf(t) + normal_pdf(t); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0, 1)");
  // Acklam's rational approximation followed by Halley steps.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double e[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
  } else if (p > 1.0 - 0.02425) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
  } else {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    const double err = normal_cdf(x) - p;
    const double u = err / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace {

std::vector<double> sorted_copy(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> v(samples.begin(), samples.end());
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite sample");
  }
  std::sort(v.begin(), v.end());
  return v;
}

// int_a^b |c - Phi(t)| dt for a <= b.
double abs_gap_integral(double a, double b, double c) {
  if (!(b > a)) return 0.0;
  auto signed_part = [c](double lo, double hi) {
    return c * (hi - lo) - (normal_cdf_integral(hi) - normal_cdf_integral(lo));
  };
  if (c <= 0.0) return -signed_part(a, b);
  if (c >= 1.0) return signed_part(a, b);
  const double t = normal_quantile(c);
  if (t <= a) return -signed_part(a, b);
  if (t >= b) return signed_part(a, b);
  return signed_part(a, t) - signed_part(t, b);
}

}  // namespace

double ks_distance(std::span<const double> samples) {
  const auto v = sorted_copy(samples);
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double phi = normal_cdf(v[i]);
    d = std::max({d, std::fabs((i + 1) / n - phi), std::fabs(i / n - phi)});
  }
  return d;
}

double wasserstein1(std::span<const double> samples) {
  const auto v = sorted_copy(samples);
  const std::size_t n = v.size();
  // Tails: int_{-inf}^{x_1} Phi and int_{x_n}^{inf} (1 - Phi).
  double total = normal_cdf_integral(v.front()) + normal_cdf_integral(-v.back());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    total += abs_gap_integral(v[i], v[i + 1], static_cast<double>(i + 1) / static_cast<double>(n));
  }
  return total;
}

std::pair<double, double> distances_with_reference(std::span<const double> samples, double mean,
                                                   double var) {
  if (!(var > 0.0)) throw std::invalid_argument("reference variance must be positive");
  const double sd = std::sqrt(var);
  std::vector<double> z(samples.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (samples[i] - mean) / sd;
  return {ks_distance(z), wasserstein1(z)};
}

std::uint64_t EnsembleSummary::seed_of(std::uint64_t replicate) const {
  return SeedSpec{base_seed, replicate}.replicate_seed();
}

void EnsembleSummary::write_samples_csv(std::ostream& os) const {
  os << "replicate,seed,statistic,point_count\n";
  char buf[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", samples[i]);
    os << i << ',' << seed_of(i) << ',' << buf << ',' << point_counts[i] << '\n';
  }
}

std::string EnsembleSummary::summary_json() const {
  nlohmann::ordered_json j;
  j["n_reps"] = n_reps;
  j["mean"] = mean;
  j["var"] = var;
  j["dK_emp"] = degenerate ? nlohmann::ordered_json() : nlohmann::ordered_json(dK_emp);
  j["dW_emp"] = degenerate ? nlohmann::ordered_json() : nlohmann::ordered_json(dW_emp);
  j["se_mean"] = se_mean;
  j["se_var"] = se_var;
  return j.dump(2) + "\n";
}

EnsembleSummary run_ensemble(const ScoreModel& model, const IntensitySpec& intensity,
                             std::uint64_t n_reps, std::uint64_t base_seed) {
  if (n_reps < 2) throw std::invalid_argument("run_ensemble needs at least two replicates");
  model.validate();
  intensity.validate();
  if (intensity.d != model.d) throw std::invalid_argument("intensity dimension mismatch");

  EnsembleSummary out;
  out.n_reps = n_reps;
  out.base_seed = base_seed;
  out.samples.assign(n_reps, 0.0);
  out.point_counts.assign(n_reps, 0);

  // Coincident draws have probability zero in the cube, but the fast path
  // still counts them exactly like the configuration path does.
  const bool fast = model.tag == ModelTag::minimal && !model.strict_dominance_fault &&
                    intensity.space == SpaceTag::cube;
  parallel_for(n_reps, [&](std::size_t r) {
    const SeedSpec seed{base_seed, r};
    if (fast) {
      Rng rng(seed);
      const auto flat = sample_poisson_flat(intensity, rng);
      out.samples[r] = static_cast<double>(count_minimal_fast(flat, intensity.d));
      out.point_counts[r] = flat.size() / intensity.d;
    } else {
      const auto config = sample_poisson(intensity, seed);
      const auto v = statistic(model, config);
      out.samples[r] = v.value;
      out.point_counts[r] = v.point_count;
    }
  });

  const double n = static_cast<double>(n_reps);
  out.mean = pairwise_sum(out.samples) / n;
  std::vector<double> dev2(n_reps), dev4(n_reps);
  for (std::size_t i = 0; i < n_reps; ++i) {
    const double e = out.samples[i] - out.mean;
    dev2[i] = e * e;
    dev4[i] = dev2[i] * dev2[i];
  }
  const double m2 = pairwise_sum(dev2) / n;
  const double m4 = pairwise_sum(dev4) / n;
  out.var = m2 * n / (n - 1.0);
  out.se_mean = std::sqrt(out.var / n);
  out.se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  out.ci_mean = 1.96 * out.se_mean;
  out.ci_var = 1.96 * out.se_var;

  out.degenerate = !(out.var > 0.0);
  if (out.degenerate) {
    out.dK_emp = out.dW_emp = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double sd = std::sqrt(out.var);
  out.normalized.resize(n_reps);
  for (std::size_t i = 0; i < n_reps; ++i) out.normalized[i] = (out.samples[i] - out.mean) / sd;
  out.dK_emp = ks_distance(out.normalized);
  out.dW_emp = wasserstein1(out.normalized);
  return out;
}

ScalingFit scaling_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw std::invalid_argument("scaling_fit needs at least four points");
  ScalingFit fit;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [s, r] = points[i];
    if (!(s > 1.0)) throw std::invalid_argument("scaling_fit needs s > 1");
    if (!(r > 0.0)) throw std::invalid_argument("scaling_fit needs positive responses");
    if (i > 0 && !(s > points[i - 1].first)) {
      throw std::invalid_argument("scaling_fit needs a strictly increasing s grid");
    }
    fit.s_grid.push_back(s);
    fit.response.push_back(r);
  }
  const std::size_t n = points.size();
  std::vector<double> x(n), y(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(std::log(fit.s_grid[i]));
    y[i] = std::log(fit.response[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.gamma = sxy / sxx;
  fit.C = std::exp(my - fit.gamma * mx);
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

namespace {

// Breakpoints 0, scale 2^-12, ..., doubling up to one, then panels of the
// given width up to `upper`.
std::vector<double> steep_breaks(double scale, double width, double upper) {
  std::vector<double> b{0.0};
  double t = std::min(scale, 1.0) * 0x1p-12;
  while (t < 1.0 && t < upper) {
    b.push_back(t);
    t *= 2.0;
  }
  t = std::max(t, 1.0);
  while (t < upper) {
    b.push_back(t);
    t += width;
  }
  b.push_back(upper);
  return b;
}

void rule_on(const std::vector<double>& breaks, const GaussRule& g, std::vector<double>& x,
             std::vector<double>& w) {
  x.clear();
  w.clear();
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      x.push_back(mid + half * g.nodes[i]);
      w.push_back(half * g.weights[i]);
    }
  }
}

}  // namespace

double variance_mecke_minimal(double s, std::size_t d, const QuadratureSpec& quad) {
  if (d != 2) {
    throw std::invalid_argument(
        "variance_mecke_minimal supports d = 2 only; use run_ensemble for other dimensions");
  }
  quad.validate();
  if (!(s > 0.0)) return 0.0;
  const double upper = std::log(std::max(s, 1.0)) + quad.tail();
  const auto& g = gauss_legendre(quad.nodes_per_axis);
  std::vector<double> u1, w1, u2, w2;
  rule_on(steep_breaks(1.0 / s, quad.panel_width, upper), g, u1, w1);

  // Pairs with x_1 < y_1, x_2 > y_2: the union of [0,x] and [0,y] splits into
  // [0,x_1]x[0,y_2] and two rectangles, so with a = x_1, b = y_2 the other two
  // coordinates integrate out, leaving
  //   int int e^{-sab} (1 - e^{-sa(1-b)}) (1 - e^{-sb(1-a)}) da db / (ab)
  // which reads as below in u1 = -log a, u2 = -log b.
  std::vector<double> rows(u1.size());
  for (std::size_t i = 0; i < u1.size(); ++i) {
    const double a = u1[i];
    const double ea = std::exp(-a);
    rule_on(steep_breaks(std::exp(a) / s, quad.panel_width, upper), g, u2, w2);
    std::vector<double> terms(u2.size());
    for (std::size_t j = 0; j < u2.size(); ++j) {
      const double b = u2[j];
      const double eb = std::exp(-b);
      const double f = std::exp(-s * ea * eb) * -std::expm1(-s * ea * -std::expm1(-b)) *
                       -std::expm1(-s * eb * -std::expm1(-a));
      terms[j] = w2[j] * f;
    }
    rows[i] = w1[i] * pairwise_sum(terms);
  }
  const double pair_term = 2.0 * pairwise_sum(rows);
  const double ef = mean_minimal(s, 2, quad);
  return ef + pair_term - ef * ef;
}

}  // namespace regstab
