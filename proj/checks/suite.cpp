#include "suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "oracles.hpp"
#include "regstab/bounds.hpp"
#include "regstab/empirics.hpp"
#include "regstab/malliavin.hpp"
#include "regstab/quadrature.hpp"
#include "regstab/sampling.hpp"
#include "regstab/scores.hpp"
#include "regstab/skyline.hpp"

namespace regstab::checks {
namespace {

constexpr ModelTag kModels[] = {ModelTag::minimal, ModelTag::lattice_isolated,
                                ModelTag::rgg_isolated};

std::size_t cases(const Options& o, std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * o.effort)));
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome fail(std::string why) { return {false, std::move(why)}; }

ScoreModel model_for(ModelTag tag, const Options& o) {
  return gen::exact_model(tag, 2, o.strict_fault && tag == ModelTag::minimal);
}

// Random sub-multiset that keeps at least one copy of `keep`.
PointConfiguration sub_config(const ScoreModel& model, const PointConfiguration& config,
                              const Point& keep, Rng& rng) {
  auto pts = gen::expand(config);
  std::vector<Point> out;
  bool kept = false;
  for (auto& p : pts) {
    if (!kept && p == keep) {
      out.push_back(p);
      kept = true;
      continue;
    }
    if (rng.uniform() < 0.5) out.push_back(p);
  }
  return gen::collect(model, out);
}

// Runs `body` on random configurations with a designated member x until
// `target` cases have been counted. body returns nullopt to skip a case,
// false on failure.
template <class Body>
Outcome per_model_cases(const Options& o, std::size_t target, std::uint64_t salt, Body&& body) {
  for (ModelTag tag : kModels) {
    const auto model = model_for(tag, o);
    Rng rng(SeedSpec{o.seed, salt * 16 + static_cast<std::uint64_t>(tag)});
    std::size_t counted = 0, tries = 0;
    while (counted < target) {
      if (++tries > 200 * target) {
        return fail(std::string(to_string(tag)) + ": too few usable cases");
      }
      auto config = gen::random_config(model, rng);
      const Point x = gen::random_point(model, rng);
      config = add(config, x, rng.uniform() < 0.2 ? 2 : 1);
      const std::optional<bool> r = body(model, config, x, rng);
      if (!r) continue;
      ++counted;
      if (!*r) {
        std::ostringstream os;
        os << to_string(tag) << ": failed at case " << counted << ", x = (";
        for (std::size_t k = 0; k < x.dim(); ++k) os << (k ? "," : "") << x[k];
        os << "), " << config.entry_count() << " entries";
        return fail(os.str());
      }
    }
  }
  return {true, std::to_string(target) + " cases per model"};
}

// ---- pointproc ----

Outcome sampling_determinism(const Options& o) {
  const IntensitySpec specs[] = {
      IntensitySpec::cube(50.0, 2),
      IntensitySpec::lattice(1.0, Box::centered(2, 3.0)),
      IntensitySpec::euclidean(5.0, Box::centered(2, 2.0), 0.5),
  };
  for (const auto& spec : specs) {
    for (std::uint64_t r = 0; r < cases(o, 20); ++r) {
      const SeedSpec seed{o.seed, r};
      if (!(sample_poisson(spec, seed) == sample_poisson(spec, seed))) {
        return fail("repeated draw differs in space " + std::string(to_string(spec.space)));
      }
    }
  }
  return {};
}

Outcome restrict_properties(const Options& o) {
  Rng rng(SeedSpec{o.seed, 101});
  for (ModelTag tag : kModels) {
    const auto model = model_for(tag, o);
    for (std::size_t i = 0; i < cases(o, 1000); ++i) {
      const auto m = gen::random_config(model, rng);
      const Point c = gen::random_point(model, rng);
      RegionDescriptor regions[] = {RegionDescriptor::empty(), RegionDescriptor::whole_space(),
                                    RegionDescriptor::box_to_origin(c),
                                    RegionDescriptor::ball(c, 1.0),
                                    RegionDescriptor::neighbor_set(c)};
      for (const auto& a : regions) {
        const auto once = restrict(m, a);
        if (!(restrict(once, a) == once)) return fail("restrict is not idempotent");
        if (!leq(once, m)) return fail("restriction exceeds the configuration");
      }
      if (!(restrict(m, RegionDescriptor::whole_space()) == m)) return fail("whole space");
      if (!restrict(m, RegionDescriptor::empty()).empty()) return fail("empty region");
    }
  }
  return {};
}

Outcome leq_partial_order(const Options& o) {
  Rng rng(SeedSpec{o.seed, 102});
  const auto model = model_for(ModelTag::lattice_isolated, o);
  std::size_t chains = 0;
  for (std::size_t i = 0; i < cases(o, 1000); ++i) {
    const auto c = gen::random_config(model, rng);
    const Point anchor = gen::random_point(model, rng);
    const auto cx = add(c, anchor);
    const auto b = sub_config(model, cx, anchor, rng);
    const auto a = rng.uniform() < 0.5 ? sub_config(model, b, anchor, rng)
                                       : gen::random_config(model, rng);
    if (!leq(a, a)) return fail("not reflexive");
    if (leq(a, b) && leq(b, a) && !(a == b)) return fail("not antisymmetric");
    if (leq(a, b) && leq(b, cx)) {
      ++chains;
      if (!leq(a, cx)) return fail("not transitive");
    }
  }
  return {true, std::to_string(chains) + " chains"};
}

Outcome cube_counts(const Options& o) {
  const auto spec = IntensitySpec::cube(100.0, 2);
  MeanAccumulator acc;
  const std::size_t n = cases(o, 10000);
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng(SeedSpec{o.seed + 1, r});
    acc.add(static_cast<double>(sample_poisson_flat(spec, rng).size() / 2));
  }
  const auto e = acc.estimate();
  const bool ok = std::fabs(e.value - 100.0) <= 4.0 * e.se;
  return {ok, fmt("mean %.3f, se %.3f", e.value, e.se)};
}

Outcome lattice_pmf(const Options& o) {
  Box site;
  site.lo = {0.0, 0.0};
  site.hi = {0.0, 0.0};
  const auto spec = IntensitySpec::lattice(1.0, site);
  const std::size_t n = cases(o, 100000);
  std::vector<double> counts(8, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto config = sample_poisson(spec, SeedSpec{o.seed + 2, r});
    counts[std::min<std::uint64_t>(config.mass(), 7)] += 1.0;
  }
  double pmf = std::exp(-1.0);
  for (int k = 0; k < 6; ++k) {
    const double freq = counts[k] / n;
    const double se = std::sqrt(pmf * (1.0 - pmf) / n);
    if (std::fabs(freq - pmf) > 4.0 * se) return fail(fmt("bin %g: %.5f vs %.5f", k, freq, pmf));
    pmf /= (k + 1);
  }
  return {true, std::to_string(n) + " draws, bins 0..5"};
}

// ---- scores ----

Outcome restriction_invariance(const Options& o) {
  return per_model_cases(o, cases(o, 1000), 1,
                         [](const ScoreModel& m, const PointConfiguration& c, const Point& x,
                            Rng&) -> std::optional<bool> {
                           const auto r = region(m, x, c);
                           if (r.is_empty()) return std::nullopt;
                           auto restricted = restrict(c, r);
                           const auto missing = c.multiplicity_of(x.coords()) -
                                                restricted.multiplicity_of(x.coords());
                           if (missing > 0) restricted = add(restricted, x, missing);
                           return score(m, x, c) == score(m, x, restricted);
                         });
}

Outcome region_monotonicity(const Options& o) {
  return per_model_cases(o, cases(o, 1000), 2,
                         [](const ScoreModel& m, const PointConfiguration& c, const Point& x,
                            Rng& rng) -> std::optional<bool> {
                           const auto smaller = sub_config(m, c, x, rng);
                           return is_subset(region(m, x, c), region(m, x, smaller));
                         });
}

Outcome sandwich(const Options& o) {
  return per_model_cases(
      o, cases(o, 1000), 3,
      [](const ScoreModel& m, const PointConfiguration& c, const Point& x,
         Rng& rng) -> std::optional<bool> {
        const auto lower = sub_config(m, c, x, rng);
        const double v = score(m, x, lower);
        if (score(m, x, c) != v) return std::nullopt;
        // Points of c - lower.
        std::vector<Point> extra;
        for (std::size_t i = 0; i < c.entry_count(); ++i) {
          const auto p = c.point(i);
          for (std::uint32_t k = lower.multiplicity_of(p.coords()); k < c.multiplicity(i); ++k) {
            extra.push_back(p);
          }
        }
        for (int t = 0; t < 4; ++t) {
          auto mid = lower;
          for (const auto& p : extra) {
            if (rng.uniform() < 0.5) mid = add(mid, p);
          }
          if (score(m, x, mid) != v) return false;
        }
        return true;
      });
}

Outcome minimal_region_frequency(const Options& o) {
  const double s = 10.0;
  const auto model = minimal_model(s, 2);
  const auto spec = IntensitySpec::cube(s, 2);
  const Point x{0.3, 0.4}, y{0.1, 0.2};
  const std::size_t n = cases(o, 4000);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto config = add(sample_poisson(spec, SeedSpec{o.seed + 4, r}), x);
    hits += region(model, x, config).contains(y);
  }
  const double p = std::exp(-rate(model, x, y));
  const double f = static_cast<double>(hits) / n;
  const double se = std::sqrt(p * (1.0 - p) / n);
  return {std::fabs(f - p) <= 4.0 * se, fmt("frequency %.4f vs exp(-r) %.4f (se %.4f)", f, p, se)};
}

Outcome order_invariance(const Options& o) {
  Rng rng(SeedSpec{o.seed, 105});
  for (ModelTag tag : kModels) {
    const auto model = model_for(tag, o);
    for (std::size_t i = 0; i < cases(o, 1000); ++i) {
      const auto c = gen::random_config(model, rng);
      auto pts = gen::expand(c);
      for (std::size_t k = pts.size(); k > 1; --k) std::swap(pts[k - 1], pts[rng.below(k)]);
      const auto shuffled = gen::collect(model, pts);
      const double h = statistic(model, c).value;
      if (statistic(model, shuffled).value != h) return fail("statistic depends on input order");
      // Sum of scores visiting the entries in a random order.
      std::vector<std::size_t> order(c.entry_count());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
      double sum = 0.0;
      for (auto e : order) sum += c.multiplicity(e) * score(model, c.point(e), c);
      if (sum != h) return fail("score sum differs from the statistic");
    }
  }
  return {};
}

Outcome skyline_oracle(const Options& o) {
  Rng rng(SeedSpec{o.seed, 106});
  const std::size_t n_inst = cases(o, 500);
  for (std::size_t inst = 0; inst < n_inst; ++inst) {
    const std::size_t d = 2 + inst % 3;
    const std::size_t n = rng.below(501);
    const bool coarse = inst % 2 == 1;
    std::vector<double> flat(n * d);
    for (auto& v : flat) v = coarse ? static_cast<double>(rng.below(6)) / 5.0 : rng.uniform();
    const auto fast = count_minimal_fast(flat, d);
    const auto slow = oracle::brute_force_minimal_count(flat, d);
    if (fast != slow) {
      return fail(fmt("instance %g (n=%g, d=%g): fast %g", inst, n, d, fast) +
                  " vs " + std::to_string(slow));
    }
  }
  return {true, std::to_string(n_inst) + " instances"};
}

// ---- malliavin ----

Outcome first_order_decomposition(const Options& o) {
  return per_model_cases(o, cases(o, 1000), 4,
                         [](const ScoreModel& m, const PointConfiguration& c, const Point&,
                            Rng& rng) -> std::optional<bool> {
                           const Point y = gen::random_point(m, rng);
                           return diff1(m, c, y).value == diff1_by_scores(m, c, y);
                         });
}

Outcome second_order_decomposition(const Options& o) {
  return per_model_cases(o, cases(o, 1000), 5,
                         [](const ScoreModel& m, const PointConfiguration& c, const Point& x,
                            Rng& rng) -> std::optional<bool> {
                           const Point y1 = rng.uniform() < 0.2 ? x : gen::random_point(m, rng);
                           const Point y2 = rng.uniform() < 0.2 ? y1 : gen::random_point(m, rng);
                           return diff2(m, c, y1, y2).value == diff2_by_scores(m, c, y1, y2);
                         });
}

Outcome second_order_symmetry(const Options& o) {
  return per_model_cases(o, cases(o, 1000), 6,
                         [](const ScoreModel& m, const PointConfiguration& c, const Point&,
                            Rng& rng) -> std::optional<bool> {
                           const Point y1 = gen::random_point(m, rng);
                           const Point y2 = gen::random_point(m, rng);
                           return diff2(m, c, y1, y2).value == diff2(m, c, y2, y1).value;
                         });
}

Outcome dnull(const Options& o) {
  return per_model_cases(o, cases(o, 1000), 7,
                         [](const ScoreModel& m, const PointConfiguration& c, const Point& x,
                            Rng& rng) -> std::optional<bool> {
                           const Point y = gen::random_point(m, rng);
                           const Point y1 = gen::random_point(m, rng);
                           const Point y2 = rng.uniform() < 0.3 ? y1 : gen::random_point(m, rng);
                           return verify_dnull(m, c, x, y, y1, y2);
                         });
}

Outcome difference_moments(const Options& o) {
  double worst = 0.0;
  auto r = per_model_cases(o, cases(o, 1000), 8,
                           [&](const ScoreModel& m, const PointConfiguration& c, const Point& x,
                               Rng& rng) -> std::optional<bool> {
                             const Point y = gen::random_point(m, rng);
                             const double d = score(m, x, add(c, y)) - score(m, x, c);
                             const double bound = m.moment_bound(x.coords());
                             if (bound > 0.0) worst = std::max(worst, std::fabs(d) / bound);
                             return std::fabs(d) <= bound;
                           });
  if (r.ok) r.detail = fmt("max |D_y xi| / M = %.3f", worst);
  return r;
}

// ---- scaling ----

Outcome scaling_identity(const Options& o) {
  Rng rng(SeedSpec{o.seed, 107});
  const double alphas[] = {0.02, 0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 40.0};
  std::size_t n = 0;
  double worst = 0.0;
  for (double alpha : alphas) {
    for (int si = 0; si < 10; ++si) {
      const double s = std::pow(10.0, 0.6 * si);
      for (int yi = 0; yi < 10; ++yi) {
        const std::size_t d = yi < 8 ? 2 : 3;
        std::vector<double> y(d);
        for (auto& v : y) v = rng.uniform();
        const double c = c_alpha_s(y, alpha, s);
        const double ref = c_alpha_s(y, 1.0, alpha * s) / alpha;
        const double err = std::fabs(c - ref) / std::max(1.0, c);
        worst = std::max(worst, err);
        ++n;
      }
    }
  }
  return {worst <= 1e-9, fmt("%g grid points, max scaled error %.2e", n, worst)};
}

// ---- bounds ----

// Supremum of c_{alpha,s}(y) / (alpha^{-1} e^{-alpha s|y|/2} (1 + |log(alpha s|y|)|^{d-1}))
// over a y grid and s in [1, s_max].
double c_bound_sup(std::size_t d, double alpha, double s_max) {
  const int per_axis = d == 2 ? 24 : 10;
  double sup = 0.0;
  for (double ls = 0.0; ls <= std::log10(s_max) + 1e-9; ls += 0.125) {
    const double s = std::pow(10.0, ls);
    std::vector<int> idx(d, 0);
    for (;;) {
      std::vector<double> y(d);
      for (std::size_t k = 0; k < d; ++k) {
        y[k] = std::pow(10.0, -8.0 * (idx[k] + 0.5) / per_axis);
      }
      const double v = alpha * s * box_volume(y);
      if (v >= 1e-12) {
        const double den = std::exp(-v / 2.0) *
                           (1.0 + std::pow(std::fabs(std::log(v)), static_cast<double>(d - 1))) / alpha;
        sup = std::max(sup, c_alpha_s(y, alpha, s) / den);
      }
      std::size_t k = d;
      bool done = true;
      while (k-- > 0) {
        if (++idx[k] < per_axis) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
  return sup;
}

Outcome c_bound(const Options&) {
  std::string detail;
  bool ok = true;
  for (std::size_t d : {2, 3}) {
    for (double alpha : {1.0, 0.02}) {
      double prev = 0.0, last = 0.0, first_step = 0.0;
      detail += "d=" + std::to_string(d) + fmt(" alpha=%g:", alpha);
      for (int k = 2; k <= 6; ++k) {
        prev = last;
        last = c_bound_sup(d, alpha, std::pow(10.0, k));
        if (k == 3) first_step = last - prev;
        detail += fmt(" %.4f", last);
        if (!std::isfinite(last)) ok = false;
      }
      // A supremum over a growing grid cannot decrease. Boundedness shows as a
      // cap the values stay under and growth that slows from decade to decade.
      if (last > 1.0 || last - prev >= first_step) ok = false;
      detail += "; ";
    }
  }
  return {ok, detail};
}

Outcome l_inequality(const Options& o) {
  Rng rng(SeedSpec{o.seed, 108});
  const std::size_t n = cases(o, 100000);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = 2 + i % 3;
    std::vector<double> a(d), b(d), y(d), ay(d), by(d), aby(d);
    for (std::size_t k = 0; k < d; ++k) {
      a[k] = static_cast<double>(rng.below(1025)) / 1024.0;
      b[k] = static_cast<double>(rng.below(1025)) / 1024.0;
      y[k] = static_cast<double>(rng.below(1025)) / 1024.0;
      ay[k] = std::min(a[k], y[k]);
      by[k] = std::min(b[k], y[k]);
      aby[k] = std::min(ay[k], b[k]);
    }
    if (box_volume(ay) * box_volume(by) > box_volume(aby) * box_volume(y)) {
      return fail("violated at triple " + std::to_string(i));
    }
  }
  return {true, std::to_string(n) + " dyadic triples"};
}

Outcome cl1_inequality(const Options& o) {
  Rng rng(SeedSpec{o.seed, 109});
  const std::size_t n = cases(o, 1000);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = i % 5 == 4 ? 3 : 2;
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform();
    const double alpha = 0.01 + 0.98 * rng.uniform();
    const double s = std::pow(10.0, 5.0 * rng.uniform());
    const double lhs = std::pow(c_alpha_s(x, 1.0, s), alpha);
    const double rhs = std::exp(-alpha * s * box_volume(x)) + c_alpha_s(x, alpha, s);
    if (lhs > rhs + 1e-9 * std::max(1.0, rhs)) {
      return fail(fmt("alpha %.3f s %.3g: %.12g > %.12g", alpha, s, lhs, rhs));
    }
  }
  return {true, std::to_string(n) + " points"};
}

Outcome c_representation(const Options& o) {
  const double s = 10.0, alpha = 1.0;
  std::string detail;
  bool ok = true;
  for (int i : {1, 2}) {
    McSpec outer;
    outer.n_samples = cases(o, 20000);
    outer.base_seed = o.seed + 10 + i;
    const auto lhs = mc_integrate(2, outer, [&](std::span<const double> x) {
      return s * std::pow(c_alpha_s(x, alpha, s), i);
    });
    McSpec joint;
    joint.n_samples = cases(o, 1000000);
    joint.base_seed = o.seed + 20 + i;
    const auto rhs = mc_integrate(2 * i, joint, [&](std::span<const double> z) {
      double m0 = z[0], m1 = z[1], sum = z[0] * z[1];
      if (i == 2) {
        m0 = std::min(m0, z[2]);
        m1 = std::min(m1, z[3]);
        sum += z[2] * z[3];
      }
      return std::pow(s, i + 1) * m0 * m1 * std::exp(-alpha * s * sum);
    });
    const double se = std::hypot(lhs.se, rhs.se);
    if (std::fabs(lhs.value - rhs.value) > 4.0 * se) ok = false;
    detail += fmt("i=%g: %.5f vs %.5f (se %.5f); ", i, lhs.value, rhs.value, se);
  }
  return {ok, detail};
}

Outcome quadrature_vs_mc(const Options& o) {
  McSpec mc;
  mc.n_samples = cases(o, 400000);
  mc.base_seed = o.seed + 30;
  std::string detail;
  bool ok = true;
  auto check = [&](const char* what, double quad, Estimate e) {
    const bool pass = std::fabs(quad - e.value) <= 4.0 * e.se + 1e-12;
    ok = ok && pass;
    if (!pass) {
      detail += std::string(what) + fmt(": quadrature %.6g vs mc %.6g (se %.2g); ", quad, e.value, e.se);
    }
  };

  const std::vector<std::vector<double>> ys = {{0.2, 0.3}, {0.05, 0.6}, {0.2, 0.3, 0.1},
                                               {0.5, 0.1, 0.4}};
  for (const auto& y : ys) {
    for (double alpha : {1.0, 0.02}) {
      check("c", c_alpha_s(y, alpha, 100.0), c_alpha_s_mc(y, alpha, 100.0, mc));
    }
  }
  for (std::size_t d : {2, 3}) {
    const double s = 1000.0;
    const auto e = mc_integrate(d, mc, [&](std::span<const double> x) {
      return s * std::exp(-s * box_volume(x));
    });
    check("mean_minimal", mean_minimal(s, d), e);
  }
  const auto m = minimal_model(100.0, 2);
  const std::vector<double> y{0.1, 0.25};
  const auto ge = mc_integrate(2, mc, [&](std::span<const double> x) {
    return dominates(x, y) ? m.s * std::exp(-m.zeta() * m.s * box_volume(x)) : 0.0;
  });
  check("g_s", g_s(m, y), ge);
  const std::vector<double> x1{0.05, 0.3}, x2{0.2, 0.1};
  const auto j = join(Point(x1), Point(x2));
  const auto qe = mc_integrate(2, mc, [&](std::span<const double> z) {
    return dominates(z, j.coords()) ? m.s * std::exp(-m.s * box_volume(z)) : 0.0;
  });
  check("q_s", q_s(m, x1, x2), qe);

  McSpec fm = mc;
  fm.n_samples = cases(o, 40000);
  for (const auto& yf : std::vector<std::vector<double>>{{0.1, 0.2}, {0.02, 0.5}}) {
    const auto det = f_alpha(m, yf, m.beta());
    const auto mce = f_alpha_mc(m, yf, m.beta(), {}, fm);
    check("f1", det.f1.value, mce.f1);
    check("f2", det.f2.value, mce.f2);
    check("f3", det.f3.value, mce.f3);
  }
  if (detail.empty()) detail = "c (d=2,3), mean, g, q, f components";
  return {ok, detail};
}

// ---- empirics ----

Outcome distances_vs_grid(const Options& o) {
  Rng rng(SeedSpec{o.seed, 110});
  std::vector<double> a(200), b(60);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = std::round(4.0 * rng.normal() + 1.0) / 4.0;  // ties
  std::string detail;
  bool ok = true;
  for (auto* sample : {&a, &b}) {
    auto v = *sample;
    std::sort(v.begin(), v.end());
    const double h = 2e-6, lo = -12.0, hi = 12.0;
    const auto steps = static_cast<std::size_t>((hi - lo) / h);
    double sup = 0.0, integral = 0.0, prev = 0.0;
    std::size_t below = 0;
    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = lo + k * h;
      while (below < v.size() && v[below] <= t) ++below;
      const double gap = std::fabs(static_cast<double>(below) / v.size() - normal_cdf(t));
      sup = std::max(sup, gap);
      if (k > 0) integral += 0.5 * h * (gap + prev);
      prev = gap;
    }
    const double dk = ks_distance(v), dw = wasserstein1(v);
    if (std::fabs(dk - sup) > 1e-6 || std::fabs(dw - integral) > 1e-6) ok = false;
    detail += fmt("dK %.7f vs %.7f, dW %.7f vs %.7f; ", dk, sup, dw, integral);
  }
  return {ok, detail};
}

Outcome thread_independence(const Options& o) {
  const char* old = std::getenv("REGION_STABILIZE_THREADS");
  const std::string saved = old ? old : "";
  auto run = [&](const char* threads) {
    setenv("REGION_STABILIZE_THREADS", threads, 1);
    auto a = run_ensemble(minimal_model(200.0, 2), IntensitySpec::cube(200.0, 2), 64, o.seed);
    const auto lm = lattice_model(5);
    auto b = run_ensemble(lm, default_intensity(lm), 64, o.seed);
    a.samples.insert(a.samples.end(), b.samples.begin(), b.samples.end());
    return a.samples;
  };
  const auto one = run("1");
  const auto eight = run("8");
  if (old) {
    setenv("REGION_STABILIZE_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("REGION_STABILIZE_THREADS");
  }
  return {one == eight, "1 vs 8 threads"};
}

Outcome ks_duplicate(const Options& o) {
  Rng rng(SeedSpec{o.seed, 111});
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(1 + rng.below(300));
    for (auto& x : v) x = rng.normal() * 1.3 + 0.2;
    auto merged = v;
    merged.insert(merged.end(), v.begin(), v.end());
    if (ks_distance(merged) != ks_distance(v)) return fail("merged sample changes dK");
  }
  return {};
}

Outcome rgg_mean_check(const Options& o) {
  const double s = 20.0;
  const auto m = rgg_model(s, 2, rgg_log_regime_radius(s, 2));
  const auto ens = run_ensemble(m, default_intensity(m), cases(o, 200), o.seed + 40);
  const double ref = rgg_mean(m);
  return {std::fabs(ens.mean - ref) <= 4.0 * ens.se_mean,
          fmt("empirical %.3f (se %.3f) vs quadrature %.3f", ens.mean, ens.se_mean, ref)};
}

}  // namespace

const std::vector<Check>& all_checks() {
  static const std::vector<Check> list = {
      {"pointproc", "sampling is reproducible from the seed", sampling_determinism},
      {"pointproc", "restrict is idempotent and never adds mass", restrict_properties},
      {"pointproc", "leq is a partial order", leq_partial_order},
      {"pointproc", "cube point counts have the Poisson mean", cube_counts},
      {"pointproc", "lattice multiplicities follow Poisson(1)", lattice_pmf},
      {"scores", "score is unchanged by restriction to its region", restriction_invariance},
      {"scores", "regions shrink as the configuration grows", region_monotonicity},
      {"scores", "equal scores at two nested configurations persist in between", sandwich},
      {"scores", "minimal region frequency equals exp(-rate)", minimal_region_frequency},
      {"scores", "statistic does not depend on entry order", order_invariance},
      {"scores", "fast skyline count equals brute force", skyline_oracle},
      {"malliavin", "first-order difference decomposes into scores", first_order_decomposition},
      {"malliavin", "second-order difference decomposes into scores", second_order_decomposition},
      {"malliavin", "second-order difference is symmetric", second_order_symmetry},
      {"malliavin", "score differences vanish outside the region", dnull},
      {"malliavin", "score differences are bounded by the moment bound", difference_moments},
      {"scaling", "c_{alpha,s} scaling identity on a 1000-point grid", scaling_identity},
      {"bounds", "c-bound ratio stays below one with slowing growth in s", c_bound},
      {"bounds", "|a^y||b^y| <= |a^b^y||y| on dyadic triples", l_inequality},
      {"bounds", "c_{1,s}^alpha <= exp(-alpha s|x|) + c_{alpha,s}", cl1_inequality},
      {"bounds", "s int c^i matches its multiple-integral form", c_representation},
      {"bounds", "quadrature agrees with Monte Carlo", quadrature_vs_mc},
      {"empirics", "dK and dW match a fine grid evaluation", distances_vs_grid},
      {"empirics", "ensemble samples do not depend on the thread count", thread_independence},
      {"empirics", "dK is unchanged by duplicating the sample", ks_duplicate},
      {"empirics", "rgg mean matches the padded-window quadrature", rgg_mean_check},
  };
  return list;
}

int run_tap(const std::string& filter, const Options& options, std::ostream& os) {
  std::vector<const Check*> selected;
  for (const auto& c : all_checks()) {
    if (filter.empty() || c.group == filter || c.description.find(filter) != std::string::npos) {
      selected.push_back(&c);
    }
  }
  os << "1.." << selected.size() << '\n';
  int failures = 0, n = 0;
  for (const auto* c : selected) {
    ++n;
    Outcome r;
    try {
      r = c->run(options);
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    os << (r.ok ? "ok " : "not ok ") << n << " - " << c->group << ": " << c->description << '\n';
    if (!r.detail.empty()) os << "# " << r.detail << '\n';
    os.flush();
    failures += !r.ok;
  }
  return failures;
}

}  // namespace regstab::checks
