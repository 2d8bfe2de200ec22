#include "regstab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "regstab/rng.hpp"

namespace regstab {
namespace {

constexpr double kUnderflow = 745.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

// exp(-a yd e^{-w}) (1 - exp(-a (1 - yd) e^{-w}))
double phi(double w, double a, double yd) {
  const double e = std::exp(-w);
  const double big = a * yd * e;
  if (big > kUnderflow) return 0.0;
  return std::exp(-big) * -std::expm1(-a * (1.0 - yd) * e);
}

// Density at w of the sum of independent uniforms on [0, v_i], scaled by
// prod v_i, i.e. the (k-1)-volume of {u in box : sum u = w}. v_i may be +inf.
double sum_density(double w, std::span<const double> v) {
  const std::size_t k = v.size();
  if (w < 0.0) return 0.0;
  if (k == 1) return w <= v[0] ? 1.0 : 0.0;
  std::vector<double> finite;
  for (double x : v) {
    if (std::isfinite(x)) finite.push_back(x);
  }
  double total = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << finite.size()); ++mask) {
    double shift = 0.0;
    int sign = 1;
    for (std::size_t i = 0; i < finite.size(); ++i) {
      if (mask >> i & 1U) {
        shift += finite[i];
        sign = -sign;
      }
    }
    const double t = w - shift;
    if (t > 0.0) total += sign * std::pow(t, static_cast<double>(k - 1));
  }
  return std::max(0.0, total / std::tgamma(static_cast<double>(k)));
}

double gl_panel(const std::function<double(double)>& f, double lo, double hi,
                const GaussRule& rule) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
  }
  return acc * half;
}

// Integral over [l, r] of f whose logarithm has slope about rate * e^{-t}.
// Panels are laid down from r towards l with width min(panel_width,
// 8 / (rate e^{-t})); the march stops once the remaining mass is negligible
// relative to `scale` plus what has been accumulated.
double integrate_steep(const std::function<double(double)>& f, double l, double r,
                       double rate, const QuadratureSpec& quad, double scale = 0.0) {
  if (!(r > l)) return 0.0;
  const auto& rule = gauss_legendre(quad.nodes_per_axis);
  double acc = 0.0;
  double t = r;
  while (t > l) {
    const double slope = rate * std::exp(-t);
    if (slope > kUnderflow) break;
    double width = quad.panel_width;
    if (slope > 0.0) width = std::min(width, 8.0 / slope);
    const double lo = std::max(l, t - width);
    const double piece = gl_panel(f, lo, t, rule);
    acc += piece;
    t = lo;
    if (acc > 0.0 && rate * std::exp(-t) > 4.0 && std::fabs(piece) <= 1e-17 * (acc + scale)) {
      break;
    }
  }
  return acc;
}

double u_cap(double a, const QuadratureSpec& quad) {
  return std::log(std::max(a, 1.0)) + quad.tail();
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
}

double prod_coords(std::span<const double> x) { return box_volume(x); }

std::vector<double> join_coords(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
  return out;
}

double lattice_weight_of(const ScoreModel& model, double x0, double x1) {
  const double x[2] = {x0, x1};
  return model.weight(x);
}

double moment_factor(double m) { return std::max(m * m, m * m * m * m); }

// Integer sites of the lattice weight support.
template <class Fn>
void for_each_site(const Box& box, double pad, Fn&& fn) {
  const long lo0 = static_cast<long>(std::ceil(box.lo[0] - pad));
  const long hi0 = static_cast<long>(std::floor(box.hi[0] + pad));
  const long lo1 = static_cast<long>(std::ceil(box.lo[1] - pad));
  const long hi1 = static_cast<long>(std::floor(box.hi[1] + pad));
  for (long a = lo0; a <= hi0; ++a) {
    for (long b = lo1; b <= hi1; ++b) fn(static_cast<double>(a), static_cast<double>(b));
  }
}

constexpr double kB[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

int lattice_common_neighbours(std::span<const double> x1, std::span<const double> x2) {
  int count = 0;
  for (const auto& b : kB) {
    const double z0 = x1[0] - b[0], z1 = x1[1] - b[1];
    if (std::fabs(x2[0] - z0) + std::fabs(x2[1] - z1) == 1.0) ++count;
  }
  return count;
}

double rgg_R(const ScoreModel& m) {
  return unit_ball_volume(m.d) * m.s * std::pow(m.rho, static_cast<double>(m.d));
}

double rgg_support_radius(const ScoreModel& m) { return m.weight_support.hi[0]; }

// s int_{R^d} fn(w(|x|)) dx for a radial weight supported in B(0, S).
double rgg_radial_integral(const ScoreModel& m, const std::function<double(double)>& fn,
                           const QuadratureSpec& quad) {
  const double S = rgg_support_radius(m);
  const double d = static_cast<double>(m.d);
  const double top = (quad.tail() + 20.0) / d + 10.0;
  const double inner = integrate(
      [&](double t) {
        const double r = S * std::exp(-t);
        const double w = m.radial_weight ? m.radial_weight(r) : 1.0;
        return std::exp(-d * t) * fn(w);
      },
      0.0, top, quad);
  return m.s * d * unit_ball_volume(m.d) * std::pow(S, d) * inner;
}

void uniform_in_ball(Rng& rng, std::span<double> out, std::span<const double> centre,
                     double radius) {
  double r2 = 0.0;
  for (auto& c : out) {
    c = rng.normal();
    r2 += c * c;
  }
  const double scale =
      radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(out.size())) / std::sqrt(r2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = centre[i] + out[i] * scale;
}

// ---- minimal model, pointwise ----

struct MinimalCtx {
  double s, zeta;
  QuadratureSpec quad;

  double G(std::span<const double> x) const {
    const double c = c_alpha_s(x, zeta, s, quad);
    const double c2 = c * c;
    return 1.0 + c2 * c2 * c;
  }
};

// s int over [0, v1] x [0, v2] (u-coordinates) of fn(x) e^{-u1-u2}, integrated
// in w = u1 + u2 (steep with the given rate) and t = u1.
double wt_integral(const std::function<double(double, double)>& fn, double v1, double v2,
                   double rate, double s, const QuadratureSpec& quad) {
  auto inner = [&](double w) {
    const double lo = std::max(0.0, w - v2), hi = std::min(v1, w);
    if (!(hi > lo)) return 0.0;
    return integrate([&](double t) { return fn(std::exp(-t), std::exp(-(w - t))); }, lo, hi,
                     quad);
  };
  std::vector<double> breaks{0.0, std::min(v1, v2), std::max(v1, v2), v1 + v2};
  double total = 0.0;
  for (std::size_t k = breaks.size() - 1; k > 0; --k) {
    total += integrate_steep([&](double w) { return std::exp(-w) * inner(w); }, breaks[k - 1],
                             breaks[k], rate, quad, total);
  }
  return s * total;
}

// s int over [l1, h1] x [l2, h2] (u-coordinates) of fn(x) e^{-u1-u2}; the first
// axis may be steep with the given rate.
double box_integral(const std::function<double(double, double)>& fn, double l1, double h1,
                    double l2, double h2, double rate1, double s, const QuadratureSpec& quad) {
  if (!(h1 > l1) || !(h2 > l2)) return 0.0;
  const double v = integrate_steep(
      [&](double t1) {
        return std::exp(-t1) *
               integrate([&](double t2) { return std::exp(-t2) * fn(std::exp(-t1), std::exp(-t2)); },
                         l2, h2, quad);
      },
      l1, h1, rate1, quad);
  return s * v;
}

FAlphaValue minimal_f_d2(const ScoreModel& model, std::span<const double> y, double alpha,
                         const QuadratureSpec& quad) {
  const double s = model.s;
  const MinimalCtx ctx{s, model.zeta(), quad};
  const double U = u_cap(s, quad);
  const double v1 = y[0] > 0.0 ? std::min(-std::log(y[0]), U) : U;
  const double v2 = y[1] > 0.0 ? std::min(-std::log(y[1]), U) : U;
  const double a = alpha * s;
  auto Gx = [&](double x1, double x2) {
    const double x[2] = {x1, x2};
    return ctx.G(x);
  };
  auto c1a = [&](double x1, double x2) {
    const double x[2] = {x1, x2};
    return std::pow(c_alpha_s(x, 1.0, s, quad), alpha);
  };

  FAlphaValue out;
  out.f1.value = wt_integral(
      [&](double x1, double x2) { return Gx(x1, x2) * std::exp(-a * x1 * x2); }, v1, v2, a, s,
      quad);
  const double below = box_integral(Gx, v1, U, v2, U, 0.0, s, quad);
  out.f2.value = std::exp(-a * y[0] * y[1]) * below;

  const double region_a = wt_integral(
      [&](double x1, double x2) { return Gx(x1, x2) * c1a(x1, x2); }, v1, v2, a, s, quad);
  const double region_b = c1a(y[0], y[1]) * below;
  const double region_c = box_integral(
      [&](double x1, double x2) { return Gx(x1, x2) * c1a(x1, y[1]); }, 0.0, v1, v2, U,
      a * y[1], s, quad);
  const double region_d = box_integral(
      [&](double x2, double x1) { return Gx(x1, x2) * c1a(y[0], x2); }, 0.0, v2, v1, U,
      a * y[0], s, quad);
  out.f3.value = region_a + region_b + region_c + region_d;
  return out;
}

FAlphaValue lattice_f(const ScoreModel& model, std::span<const double> y, double alpha) {
  const double s = model.s;
  const double g = g_s(model, y);
  const double g5 = std::pow(g, 5.0);
  auto G = [&](double a, double b) { return moment_factor(lattice_weight_of(model, a, b)) * (1.0 + g5); };
  FAlphaValue out;
  double near = 0.0;
  for (const auto& b : kB) near += G(y[0] + b[0], y[1] + b[1]);
  out.f1.value = s * std::exp(-4.0 * s * alpha) * near;
  out.f2.value = out.f1.value;
  double f3 = 0.0;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      if (std::abs(a) + std::abs(b) > 2) continue;
      const double x[2] = {y[0] + a, y[1] + b};
      const double q = q_s(model, x, y);
      if (q > 0.0) f3 += G(x[0], x[1]) * std::pow(q, alpha);
    }
  }
  out.f3.value = s * f3;
  return out;
}


// f_alpha for the rgg model: x drawn uniformly in B(y, 2 rho), which covers
// the supports of all three components.
FAlphaValue rgg_f(const ScoreModel& m, std::span<const double> y, double alpha,
                  const McSpec& mc) {
  const double R = rgg_R(m);
  const double g5 = std::pow(g_s(m, y), 5.0);
  const double near = std::exp(-alpha * R);
  const double far = std::pow(R * std::exp(-R), alpha);
  const double vol = unit_ball_volume(m.d) * std::pow(2.0 * m.rho, static_cast<double>(m.d));
  Rng rng(SeedSpec{mc.base_seed, 1});
  std::vector<double> x(m.d);
  MeanAccumulator a1, a3;
  for (std::uint64_t i = 0; i < mc.n_samples; ++i) {
    uniform_in_ball(rng, x, y, 2.0 * m.rho);
    const double G = moment_factor(m.weight(x)) * (1.0 + g5);
    a1.add(distance_sq(x, y) <= m.rho * m.rho ? G : 0.0);
    a3.add(G);
  }
  const double scale = m.s * vol;
  FAlphaValue out;
  const auto e1 = a1.estimate();
  out.f1 = {scale * near * e1.value, scale * near * e1.se};
  out.f2 = out.f1;
  const auto e3 = a3.estimate();
  out.f3 = {scale * far * e3.value, scale * far * e3.se};
  return out;
}

}  // namespace

std::string_view to_string(ValueKind kind) {
  return kind == ValueKind::value ? "value" : "bound";
}

double c_alpha_s(std::span<const double> y, double alpha, double s,
                 const QuadratureSpec& quad) {
  return c_alpha_s_estimate(y, alpha, s, quad).value;
}

Estimate c_alpha_s_estimate(std::span<const double> y, double alpha, double s,
                            const QuadratureSpec& quad, const McSpec& mc) {
  check_alpha(alpha);
  if (!(s >= 0.0)) throw std::invalid_argument("s must be >= 0");
  const std::size_t d = y.size();
  if (d == 0) throw std::invalid_argument("c_alpha_s: empty point");
  if (s == 0.0) return {};
  for (double c : y) {
    if (c >= 1.0) return {};
    if (c < 0.0) throw std::invalid_argument("c_alpha_s: y must lie in [0,1]^d");
  }
  const double a = alpha * s;
  const double yd = y[d - 1];
  if (d == 1) return {phi(0.0, a, yd) / alpha, 0.0};
  if (d > quad.max_dim_tensor) return c_alpha_s_mc(y, alpha, s, mc);

  std::vector<double> v(d - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    v[i] = y[i] > 0.0 ? -std::log(y[i]) : kInf;
    sum += v[i];
  }
  const double top = std::min(sum, u_cap(a, quad));
  std::vector<double> breaks{0.0, top};
  for (std::size_t mask = 1; mask < (std::size_t{1} << v.size()); ++mask) {
    double shift = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (mask >> i & 1U) shift += v[i];
    }
    if (shift < top) breaks.push_back(shift);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto f = [&](double w) { return phi(w, a, yd) * sum_density(w, v); };
  double total = 0.0;
  for (std::size_t k = breaks.size() - 1; k > 0; --k) {
    total += integrate_steep(f, breaks[k - 1], breaks[k], a * yd, quad, total);
  }
  return {total / alpha, 0.0};
}

Estimate c_alpha_s_mc(std::span<const double> y, double alpha, double s, const McSpec& mc) {
  check_alpha(alpha);
  const std::size_t d = y.size();
  if (s == 0.0) return {};
  for (double c : y) {
    if (c >= 1.0) return {};
  }
  const double a = alpha * s;
  const double yd = y[d - 1];
  if (d == 1) return {phi(0.0, a, yd) / alpha, 0.0};
  const double cap = u_cap(a, QuadratureSpec{});
  std::vector<double> V(d - 1);
  double vol = 1.0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    V[i] = y[i] > 0.0 ? std::min(-std::log(y[i]), cap) : cap;
    vol *= V[i];
  }
  auto est = mc_integrate(d - 1, mc, [&](std::span<const double> u) {
    double w = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) w += V[i] * u[i];
    return vol * phi(w, a, yd) / alpha;
  });
  return est;
}

double mean_minimal(double s, std::size_t d, const QuadratureSpec& quad) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("s must be >= 0");
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  const std::vector<double> origin(d, 0.0);
  QuadratureSpec q = quad;
  q.max_dim_tensor = std::max<std::size_t>(q.max_dim_tensor, d);
  return c_alpha_s(origin, 1.0, s, q);
}

double kappa_s(const ScoreModel& model, std::span<const double> x) {
  switch (model.tag) {
    case ModelTag::minimal:
      return std::exp(-model.s * prod_coords(x));
    case ModelTag::lattice_isolated:
      return std::exp(-4.0 * model.s);
    case ModelTag::rgg_isolated:
      return std::exp(-rgg_R(model));
  }
  return 0.0;
}

ValueKind kappa_kind(const ScoreModel& model) {
  return model.tag == ModelTag::rgg_isolated ? ValueKind::bound : ValueKind::value;
}

double g_s(const ScoreModel& model, std::span<const double> y, const QuadratureSpec& quad) {
  const double zeta = model.zeta();
  switch (model.tag) {
    case ModelTag::minimal:
      return c_alpha_s(y, zeta, model.s, quad);
    case ModelTag::lattice_isolated:
      return 4.0 * model.s * std::exp(-4.0 * model.s * zeta);
    case ModelTag::rgg_isolated: {
      const double R = rgg_R(model);
      return R * std::exp(-zeta * R);
    }
  }
  return 0.0;
}

double G_s(const ScoreModel& model, std::span<const double> y, const QuadratureSpec& quad) {
  const double m = moment_factor(model.moment_bound(y));
  if (m == 0.0) return 0.0;
  return m * (1.0 + std::pow(g_s(model, y, quad), 5.0));
}

double q_s(const ScoreModel& model, std::span<const double> x1, std::span<const double> x2,
           const QuadratureSpec& quad) {
  switch (model.tag) {
    case ModelTag::minimal: {
      const auto j = join_coords(x1, x2);
      return c_alpha_s(j, 1.0, model.s, quad);
    }
    case ModelTag::lattice_isolated:
      return model.s * lattice_common_neighbours(x1, x2) * std::exp(-4.0 * model.s);
    case ModelTag::rgg_isolated: {
      const double R = rgg_R(model);
      return distance_sq(x1, x2) <= 4.0 * model.rho * model.rho ? R * std::exp(-R) : 0.0;
    }
  }
  return 0.0;
}

ValueKind q_kind(const ScoreModel& model) {
  return model.tag == ModelTag::rgg_isolated ? ValueKind::bound : ValueKind::value;
}

FAlphaValue f_alpha(const ScoreModel& model, std::span<const double> y, double alpha,
                    const QuadratureSpec& quad, const McSpec& mc) {
  check_alpha(alpha);
  switch (model.tag) {
    case ModelTag::minimal:
      if (model.d == 2) return minimal_f_d2(model, y, alpha, quad);
      return f_alpha_mc(model, y, alpha, quad, mc);
    case ModelTag::lattice_isolated:
      return lattice_f(model, y, alpha);
    case ModelTag::rgg_isolated:
      return rgg_f(model, y, alpha, mc);
  }
  return {};
}

FAlphaValue f_alpha_mc(const ScoreModel& model, std::span<const double> y, double alpha,
                       const QuadratureSpec& quad, const McSpec& mc) {
  check_alpha(alpha);
  if (model.tag != ModelTag::minimal) throw std::invalid_argument("f_alpha_mc: minimal model only");
  const std::size_t d = model.d;
  const double s = model.s;
  const double a = alpha * s;
  const MinimalCtx ctx{s, model.zeta(), quad};
  const double U = u_cap(s, quad);
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = y[i] > 0.0 ? std::min(-std::log(y[i]), U) : U;
  std::vector<double> x(d);

  // Integral over the u-box [lo, hi] of s * fn(x) * |x|.
  auto box = [&](std::span<const double> lo, std::span<const double> hi, std::uint64_t stream,
                 const std::function<double(std::span<const double>)>& fn) -> Estimate {
    double vol = 1.0;
    for (std::size_t i = 0; i < d; ++i) vol *= std::max(0.0, hi[i] - lo[i]);
    if (vol == 0.0) return {};
    McSpec spec = mc;
    spec.base_seed = mc.base_seed + stream;
    auto e = mc_integrate(d, spec, [&](std::span<const double> u) {
      for (std::size_t i = 0; i < d; ++i) x[i] = std::exp(-(lo[i] + (hi[i] - lo[i]) * u[i]));
      return vol * s * fn(x) * prod_coords(x);
    });
    return e;
  };
  const std::vector<double> zero(d, 0.0), top(d, U);
  FAlphaValue out;
  out.f1 = box(zero, v, 0, [&](std::span<const double> p) {
    return ctx.G(p) * std::exp(-a * prod_coords(p));
  });
  const auto below = box(v, top, 1, [&](std::span<const double> p) { return ctx.G(p); });
  const double damp = std::exp(-a * prod_coords(y));
  out.f2 = {damp * below.value, damp * below.se};
  out.f3 = box(zero, top, 2, [&](std::span<const double> p) {
    const auto j = join_coords(p, y);
    return ctx.G(p) * std::pow(c_alpha_s(j, 1.0, s, quad), alpha);
  });
  return out;
}

// ---- grid engine, minimal d = 2 ----

namespace {

void prefix_rows(std::vector<double>& t, std::size_t n, double h) {
  // cumulative trapezoid along the first index
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0, prev = t[j];
    t[j] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double cur = t[i * n + j];
      acc += 0.5 * h * (prev + cur);
      prev = cur;
      t[i * n + j] = acc;
    }
  }
}

void prefix_cols(std::vector<double>& t, std::size_t n, double h) {
  for (std::size_t i = 0; i < n; ++i) {
    double* row = t.data() + i * n;
    double acc = 0.0, prev = row[0];
    row[0] = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double cur = row[j];
      acc += 0.5 * h * (prev + cur);
      prev = cur;
      row[j] = acc;
    }
  }
}

void suffix_rows(std::vector<double>& t, std::size_t n, double h) {
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0, prev = t[(n - 1) * n + j];
    t[(n - 1) * n + j] = 0.0;
    for (std::size_t i = n - 1; i-- > 0;) {
      const double cur = t[i * n + j];
      acc += 0.5 * h * (prev + cur);
      prev = cur;
      t[i * n + j] = acc;
    }
  }
}

void suffix_cols(std::vector<double>& t, std::size_t n, double h) {
  for (std::size_t i = 0; i < n; ++i) {
    double* row = t.data() + i * n;
    double acc = 0.0, prev = row[n - 1];
    row[n - 1] = 0.0;
    for (std::size_t j = n - 1; j-- > 0;) {
      const double cur = row[j];
      acc += 0.5 * h * (prev + cur);
      prev = cur;
      row[j] = acc;
    }
  }
}

}  // namespace

MinimalGrid::MinimalGrid(double s, double p, double step, double tail) : s_(s), p_(p), h_(step) {
  if (!(s >= 1.0)) throw std::invalid_argument("MinimalGrid: s must be >= 1");
  if (!(step > 0.0)) throw std::invalid_argument("MinimalGrid: step must be > 0");
  const double U = std::log(s) + tail;
  const auto half = static_cast<std::size_t>(std::ceil(U / (2.0 * step)));
  n_ = 2 * half + 1;
  const double zeta = p / (40.0 + 10.0 * p);
  c_zeta_ = c_table(zeta);
  c_one_ = c_table(1.0);
  G_.resize(n_ * n_);
  for (std::size_t k = 0; k < G_.size(); ++k) {
    const double c = c_zeta_[k];
    G_[k] = 1.0 + c * c * c * c * c;
  }
}

MinimalGrid MinimalGrid::coarsened() const {
  if (n_ % 2 == 0) throw std::logic_error("MinimalGrid::coarsened: even size");
  MinimalGrid out;
  out.s_ = s_;
  out.p_ = p_;
  out.h_ = 2.0 * h_;
  out.n_ = (n_ + 1) / 2;
  auto sub = [&](const std::vector<double>& t) {
    std::vector<double> r(out.n_ * out.n_);
    for (std::size_t i = 0; i < out.n_; ++i) {
      for (std::size_t j = 0; j < out.n_; ++j) r[i * out.n_ + j] = t[2 * i * n_ + 2 * j];
    }
    return r;
  };
  out.c_zeta_ = sub(c_zeta_);
  out.c_one_ = sub(c_one_);
  out.G_ = sub(G_);
  return out;
}

std::vector<double> MinimalGrid::c_table(double alpha) const {
  // c(u_i, u_j) = (1/alpha) int_0^{u_i} phi_{y_j}(t) dt, cumulated interval by
  // interval; intervals are split so that phi changes by at most e^4 inside
  // each 8-point panel.
  const auto& rule = gauss_legendre(8);
  const double a = alpha * s_;
  std::vector<double> out(n_ * n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const double y2 = std::exp(-u(j));
    const double A = a * y2;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double lo = u(i), hi = u(i + 1);
      if (A * std::exp(-hi) <= kUnderflow) {
        const double slope = A * std::exp(-lo);
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(h_ * slope / 4.0)));
        const double w = (hi - lo) / static_cast<double>(m);
        for (std::size_t k = 0; k < m; ++k) {
          const double mid = lo + (k + 0.5) * w;
          double piece = 0.0;
          for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            piece += rule.weights[q] * phi(mid + 0.5 * w * rule.nodes[q], a, y2);
          }
          acc += 0.5 * w * piece;
        }
      }
      out[(i + 1) * n_ + j] = acc / alpha;
    }
  }
  return out;
}

MinimalGrid::FTables MinimalGrid::f_tables(double alpha) const {
  check_alpha(alpha);
  const std::size_t n = n_;
  const double h = h_;
  const double a = alpha * s_;
  std::vector<double> X(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) X[i * n + j] = std::exp(-u(i) - u(j));
  }
  std::vector<double> c1a(n * n);
  for (std::size_t k = 0; k < n * n; ++k) c1a[k] = std::pow(c_one_[k], alpha);

  FTables out;
  // f1: prefix of s G e^{-a X} X over u' <= u.
  out.f1.resize(n * n);
  for (std::size_t k = 0; k < n * n; ++k) out.f1[k] = s_ * G_[k] * std::exp(-a * X[k]) * X[k];
  prefix_rows(out.f1, n, h);
  prefix_cols(out.f1, n, h);

  // k2 = s G X and its suffix sums.
  std::vector<double> k2(n * n);
  for (std::size_t k = 0; k < n * n; ++k) k2[k] = s_ * G_[k] * X[k];
  std::vector<double> below = k2;
  suffix_rows(below, n, h);
  suffix_cols(below, n, h);
  out.f2.resize(n * n);
  for (std::size_t k = 0; k < n * n; ++k) out.f2[k] = std::exp(-a * X[k]) * below[k];

  // f3 over four quadrants around y.
  std::vector<double> f3(n * n);
  for (std::size_t k = 0; k < n * n; ++k) f3[k] = k2[k] * c1a[k];
  prefix_rows(f3, n, h);
  prefix_cols(f3, n, h);
  for (std::size_t k = 0; k < n * n; ++k) f3[k] += c1a[k] * below[k];

  std::vector<double> side = k2;  // suffix along j, then weighted by c1(i', j)^alpha
  suffix_cols(side, n, h);
  for (std::size_t k = 0; k < n * n; ++k) side[k] *= c1a[k];
  prefix_rows(side, n, h);
  for (std::size_t k = 0; k < n * n; ++k) f3[k] += side[k];

  side = k2;  // suffix along i, then weighted by c1(i, j')^alpha
  suffix_rows(side, n, h);
  for (std::size_t k = 0; k < n * n; ++k) side[k] *= c1a[k];
  prefix_cols(side, n, h);
  for (std::size_t k = 0; k < n * n; ++k) f3[k] += side[k];
  out.f3 = std::move(f3);
  return out;
}

double MinimalGrid::integrate(std::span<const double> table) const {
  const std::size_t n = n_;
  std::vector<double> row(n);
  std::vector<double> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = table[i * n + j] * std::exp(-u(i) - u(j));
      if (j == 0 || j == n - 1) row[j] *= 0.5;
    }
    cols[i] = pairwise_sum(row) * h_;
    if (i == 0 || i == n - 1) cols[i] *= 0.5;
  }
  return s_ * pairwise_sum(cols) * h_;
}

std::vector<double> MinimalGrid::kg_G(double beta) const {
  std::vector<double> out(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t k = i * n_ + j;
      const double kappa = std::exp(-s_ * std::exp(-u(i) - u(j)));
      out[k] = std::pow(kappa + c_zeta_[k], 2.0 * beta) * G_[k];
    }
  }
  return out;
}

namespace {

struct GridValues {
  double t1, t2, t3;
  std::array<double, 3> comp;
};

GridValues grid_values(const MinimalGrid& grid, double beta, double alpha_comp) {
  GridValues v{};
  {
    auto f = grid.f_tables(beta);
    std::vector<double> sq(f.f1.size());
    for (std::size_t k = 0; k < sq.size(); ++k) {
      const double t = f.f1[k] + f.f2[k] + f.f3[k];
      sq[k] = t * t;
    }
    v.t1 = grid.integrate(sq);
  }
  {
    auto f = grid.f_tables(alpha_comp);
    v.comp = {grid.integrate(f.f1), grid.integrate(f.f2), grid.integrate(f.f3)};
    v.t2 = v.comp[0] + v.comp[1] + v.comp[2];
  }
  v.t3 = grid.integrate(grid.kg_G(beta));
  return v;
}

Estimate richardson(double fine, double coarse) {
  return {(4.0 * fine - coarse) / 3.0, std::fabs(fine - coarse) / 3.0};
}

}  // namespace

OuterTerms minimal_outer_grid(double s, double p, const QuadratureSpec& quad) {
  quad.validate();
  const double beta = p / (32.0 + 4.0 * p);
  const MinimalGrid fine(s, p, quad.grid_step, quad.tail());
  const auto vf = grid_values(fine, beta, 2.0 * beta);
  const auto vc = grid_values(fine.coarsened(), beta, 2.0 * beta);
  OuterTerms out;
  out.int_f_beta_sq = richardson(vf.t1, vc.t1);
  out.int_f_2beta = richardson(vf.t2, vc.t2);
  out.int_kg_G = richardson(vf.t3, vc.t3);
  out.method = "grid";
  return out;
}

std::array<Estimate, 3> minimal_grid_f_integrals(double s, double p, double alpha,
                                                 const QuadratureSpec& quad) {
  quad.validate();
  const MinimalGrid fine(s, p, quad.grid_step, quad.tail());
  const MinimalGrid coarse = fine.coarsened();
  std::array<Estimate, 3> out;
  const auto ff = fine.f_tables(alpha);
  const auto fc = coarse.f_tables(alpha);
  out[0] = richardson(fine.integrate(ff.f1), coarse.integrate(fc.f1));
  out[1] = richardson(fine.integrate(ff.f2), coarse.integrate(fc.f2));
  out[2] = richardson(fine.integrate(ff.f3), coarse.integrate(fc.f3));
  return out;
}

MinimalMcTerms minimal_outer_mc(double s, std::size_t d, double p, double alpha,
                                const QuadratureSpec& quad, const McSpec& mc) {
  check_alpha(alpha);
  const ScoreModel model = minimal_model(s, d, p);
  const MinimalCtx ctx{s, model.zeta(), quad};
  const double beta = model.beta();
  const double U = u_cap(s, quad);
  const double vol = std::pow(U, static_cast<double>(d));
  std::vector<double> x(d), y(d), j(d);
  auto point = [&](std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < d; ++i) out[i] = std::exp(-U * u[i]);
  };
  auto spec = [&](std::uint64_t k) {
    McSpec m = mc;
    m.base_seed = mc.base_seed + k;
    return m;
  };
  MinimalMcTerms out;
  out.int_f1 = mc_integrate(d, spec(0), [&](std::span<const double> u) {
    point(u, x);
    const double X = prod_coords(x);
    return vol * s * ctx.G(x) * std::exp(-alpha * s * X) * s * X * X;
  });
  out.int_f2 = mc_integrate(d, spec(1), [&](std::span<const double> u) {
    point(u, x);
    return vol * s * ctx.G(x) * c_alpha_s(x, alpha, s, quad) * prod_coords(x);
  });
  out.int_f3 = mc_integrate(2 * d, spec(2), [&](std::span<const double> u) {
    point(u.first(d), x);
    point(u.subspan(d), y);
    for (std::size_t i = 0; i < d; ++i) j[i] = std::max(x[i], y[i]);
    return vol * vol * s * s * ctx.G(x) * std::pow(c_alpha_s(j, 1.0, s, quad), alpha) *
           prod_coords(x) * prod_coords(y);
  });
  out.int_kg_G = mc_integrate(d, spec(3), [&](std::span<const double> u) {
    point(u, x);
    const double X = prod_coords(x);
    const double c = c_alpha_s(x, model.zeta(), s, quad);
    const double G = 1.0 + std::pow(c, 5.0);
    return vol * s * std::pow(std::exp(-s * X) + c, 2.0 * beta) * G * X;
  });
  return out;
}

namespace {

OuterTerms lattice_outer(const ScoreModel& model) {
  const double beta = model.beta();
  const double s = model.s;
  OuterTerms out;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  const double kappa = kappa_s(model, std::array<double, 2>{0.0, 0.0});
  for_each_site(model.weight_support, 2.0, [&](double a, double b) {
    const double y[2] = {a, b};
    const auto fb = lattice_f(model, y, beta);
    const auto f2 = lattice_f(model, y, 2.0 * beta);
    t1 += fb.total() * fb.total();
    t2 += f2.total();
    const double G = G_s(model, y);
    if (G > 0.0) t3 += std::pow(kappa + g_s(model, y), 2.0 * beta) * G;
  });
  out.int_f_beta_sq = {s * t1, 0.0};
  out.int_f_2beta = {s * t2, 0.0};
  out.int_kg_G = {s * t3, 0.0};
  out.method = "exact";
  return out;
}

OuterTerms rgg_outer(const ScoreModel& m, const QuadratureSpec& quad, const McSpec& mc) {
  const double beta = m.beta();
  const double R = rgg_R(m);
  const double g = g_s(m, std::vector<double>(m.d, 0.0));
  const double g5 = std::pow(g, 5.0);
  const double kappa = std::exp(-R);
  const double sG = (1.0 + g5) * rgg_radial_integral(m, moment_factor, quad);

  OuterTerms out;
  out.method = "quadrature+mc";
  out.int_kg_G = {std::pow(kappa + g, 2.0 * beta) * sG, 0.0};
  // s Q f^{(1)} = s Q f^{(2)} = e^{-alpha R} R s Q G; s Q f^{(3)} = (R e^{-R})^alpha 2^d R s Q G.
  const double a2 = 2.0 * beta;
  const double two_d = std::pow(2.0, static_cast<double>(m.d));
  out.int_f_2beta = {(2.0 * std::exp(-a2 * R) * R + std::pow(R * std::exp(-R), a2) * two_d * R) * sG,
                     0.0};

  // s Q f_beta^2: y uniform in B(0, S + 2 rho), two independent inner estimates.
  const double outer_radius = rgg_support_radius(m) + 2.0 * m.rho;
  const double outer_vol = unit_ball_volume(m.d) * std::pow(outer_radius, static_cast<double>(m.d));
  const auto n_outer = static_cast<std::uint64_t>(
      std::max(200.0, std::floor(std::sqrt(static_cast<double>(mc.n_samples)))));
  const auto n_inner = std::max<std::uint64_t>(50, mc.n_samples / n_outer / 2);
  const double near = std::exp(-beta * R);
  const double far = std::pow(R * std::exp(-R), beta);
  const double inner_vol = unit_ball_volume(m.d) * std::pow(2.0 * m.rho, static_cast<double>(m.d));
  Rng rng(SeedSpec{mc.base_seed, 7});
  std::vector<double> y(m.d), x(m.d);
  const std::vector<double> origin(m.d, 0.0);
  MeanAccumulator acc;
  for (std::uint64_t i = 0; i < n_outer; ++i) {
    uniform_in_ball(rng, y, origin, outer_radius);
    double half[2];
    for (double& hv : half) {
      double sum = 0.0;
      for (std::uint64_t k = 0; k < n_inner; ++k) {
        uniform_in_ball(rng, x, y, 2.0 * m.rho);
        const double G = moment_factor(m.weight(x)) * (1.0 + g5);
        sum += G * ((distance_sq(x, y) <= m.rho * m.rho ? 2.0 * near : 0.0) + far);
      }
      hv = m.s * inner_vol * sum / static_cast<double>(n_inner);
    }
    acc.add(m.s * outer_vol * half[0] * half[1]);
  }
  out.int_f_beta_sq = acc.estimate();
  return out;
}

OuterTerms minimal_outer_nested(const ScoreModel& m, const QuadratureSpec& quad, const McSpec& mc) {
  const double beta = m.beta();
  const auto comps = minimal_outer_mc(m.s, m.d, m.p, 2.0 * beta, quad, mc);
  OuterTerms out;
  out.method = "mc";
  out.int_f_2beta = {comps.int_f1.value + comps.int_f2.value + comps.int_f3.value,
                     std::sqrt(comps.int_f1.se * comps.int_f1.se + comps.int_f2.se * comps.int_f2.se +
                               comps.int_f3.se * comps.int_f3.se)};
  out.int_kg_G = comps.int_kg_G;

  const std::size_t d = m.d;
  const double U = u_cap(m.s, quad);
  const auto n_outer = static_cast<std::uint64_t>(
      std::max(200.0, std::floor(std::sqrt(static_cast<double>(mc.n_samples)))));
  const auto n_inner = std::max<std::uint64_t>(1000, mc.n_samples / n_outer / 2);
  Rng rng(SeedSpec{mc.base_seed, 11});
  std::vector<double> y(d);
  MeanAccumulator acc;
  for (std::uint64_t i = 0; i < n_outer; ++i) {
    double uy = 0.0;
    for (auto& c : y) {
      const double u = U * rng.uniform();
      uy += u;
      c = std::exp(-u);
    }
    McSpec inner{n_inner, rng.next_u64(), false};
    const double fa = f_alpha_mc(m, y, beta, quad, inner).total();
    inner.base_seed = rng.next_u64();
    const double fb = f_alpha_mc(m, y, beta, quad, inner).total();
    acc.add(std::pow(U, static_cast<double>(d)) * m.s * std::exp(-uy) * fa * fb);
  }
  out.int_f_beta_sq = acc.estimate();
  return out;
}

}  // namespace

OuterTerms outer_integrals(const ScoreModel& model, const QuadratureSpec& quad, const McSpec& mc) {
  model.validate();
  switch (model.tag) {
    case ModelTag::minimal:
      if (model.s < 1.0) throw std::invalid_argument("outer_integrals: s must be >= 1");
      if (model.d == 2) return minimal_outer_grid(model.s, model.p, quad);
      return minimal_outer_nested(model, quad, mc);
    case ModelTag::lattice_isolated:
      return lattice_outer(model);
    case ModelTag::rgg_isolated:
      return rgg_outer(model, quad, mc);
  }
  return {};
}

BoundReport assemble_bound(const ScoreModel& model, const OuterTerms& terms, double var,
                           std::string var_source) {
  if (!(var > 0.0) || !std::isfinite(var)) throw std::invalid_argument("var must be > 0");
  BoundReport r;
  r.model = std::string(to_string(model.tag));
  r.s = model.s;
  r.d = model.d;
  r.p = model.p;
  r.zeta = model.zeta();
  r.beta = model.beta();
  r.terms = terms;
  r.var = var;
  r.var_source = std::move(var_source);
  r.kappa_kind = kappa_kind(model);
  r.q_kind = q_kind(model);

  const double t1 = terms.int_f_beta_sq.value;
  const double t2 = terms.int_f_2beta.value;
  const double t3 = terms.int_kg_G.value;
  if (t1 < 0.0 || t2 < 0.0 || t3 < 0.0) throw std::invalid_argument("negative integral term");
  r.dW_norm = std::sqrt(t1) / var + t3 / std::pow(var, 1.5);
  r.dK_norm = (std::sqrt(t1) + std::sqrt(t2)) / var + std::sqrt(t3) / var +
              t3 / std::pow(var, 1.5) + (std::pow(t3, 1.25) + std::pow(t3, 1.5)) / (var * var);
  return r;
}

std::string BoundReport::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["s"] = s;
  j["d"] = d;
  j["p"] = p;
  j["zeta"] = zeta;
  j["beta"] = beta;
  j["int_f_beta_sq"] = terms.int_f_beta_sq.value;
  j["int_f_2beta"] = terms.int_f_2beta.value;
  j["int_kg_G"] = terms.int_kg_G.value;
  j["var"] = var;
  j["var_source"] = var_source;
  j["dW_norm"] = dW_norm;
  j["dK_norm"] = dK_norm;
  j["se_int_f_beta_sq"] = terms.int_f_beta_sq.se;
  j["se_int_f_2beta"] = terms.int_f_2beta.se;
  j["se_int_kg_G"] = terms.int_kg_G.se;
  j["method"] = terms.method;
  j["kappa_kind"] = std::string(to_string(kappa_kind));
  j["q_kind"] = std::string(to_string(q_kind));
  j["constant"] = "C(p) = 1";
  j["vacuous"] = dK_norm > 1.0;
  return j.dump(2) + "\n";
}

double variance_lattice_exact(const ScoreModel& model) {
  if (model.tag != ModelTag::lattice_isolated) {
    throw std::invalid_argument("variance_lattice_exact: lattice model only");
  }
  const double s = model.s;
  const double e4 = std::exp(-4.0 * s), e6 = std::exp(-6.0 * s), e7 = std::exp(-7.0 * s),
               e8 = std::exp(-8.0 * s);
  double one_point = 0.0, pairs = 0.0;
  for_each_site(model.weight_support, 0.0, [&](double a, double b) {
    const double wx = lattice_weight_of(model, a, b);
    if (wx == 0.0) return;
    one_point += wx * wx;
    for (int da = -2; da <= 2; ++da) {
      for (int db = -2; db <= 2; ++db) {
        const int l1 = std::abs(da) + std::abs(db);
        if (l1 > 2) continue;
        const double wy = lattice_weight_of(model, a + da, b + db);
        if (wy == 0.0) continue;
        double term = 0.0;
        if (l1 == 0) {
          term = e4 - e8;
        } else if (l1 == 1) {
          term = -e8;
        } else if (da == 0 || db == 0) {
          term = e7 - e8;
        } else {
          term = e6 - e8;
        }
        pairs += wx * wy * term;
      }
    }
  });
  return s * e4 * one_point + s * s * pairs;
}

double rgg_weight_moment(const ScoreModel& model, int i, const QuadratureSpec& quad) {
  if (model.tag != ModelTag::rgg_isolated) throw std::invalid_argument("rgg model only");
  return rgg_radial_integral(model, [i](double w) { return std::pow(w, i); }, quad);
}

double rgg_mean(const ScoreModel& model, const QuadratureSpec& quad) {
  return std::exp(-rgg_R(model)) * rgg_weight_moment(model, 1, quad);
}

}  // namespace regstab
