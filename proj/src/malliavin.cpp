#include "regstab/malliavin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "regstab/bounds.hpp"
#include "regstab/parallel.hpp"
#include "regstab/quadrature.hpp"

namespace regstab {
namespace {

double H(const ScoreModel& model, const PointConfiguration& config) {
  return statistic(model, config).value;
}

bool nonzero(double d, double scale) { return std::fabs(d) > 1e-10 * (1.0 + std::fabs(scale)); }

struct TermTriple {
  double gamma = 0.0, bw = 0.0, bk = 0.0;
};

}  // namespace

DifferenceValue diff1(const ScoreModel& model, const PointConfiguration& config, const Point& y) {
  return {H(model, add(config, y)) - H(model, config), 1, {y}};
}

DifferenceValue diff2(const ScoreModel& model, const PointConfiguration& config, const Point& y1,
                      const Point& y2) {
  const auto c1 = add(config, y1);
  const auto c2 = add(config, y2);
  const auto c12 = add(c1, y2);
  // (H12 - H1) - (H2 - H0) keeps the evaluation symmetric up to the order of
  // the two brackets, which is exact for integer and dyadic values.
  const double value = (H(model, c12) - H(model, c1)) - (H(model, c2) - H(model, config));
  return {value, 2, {y1, y2}};
}

double diff1_by_scores(const ScoreModel& model, const PointConfiguration& config, const Point& y) {
  const auto with = add(config, y);
  double v = score(model, y, with);
  for (std::size_t i = 0; i < config.entry_count(); ++i) {
    const Point x = config.point(i);
    v += config.multiplicity(i) * (score(model, x, with) - score(model, x, config));
  }
  return v;
}

double diff2_by_scores(const ScoreModel& model, const PointConfiguration& config, const Point& y1,
                       const Point& y2) {
  const auto c1 = add(config, y1);
  const auto c2 = add(config, y2);
  const auto c12 = add(c1, y2);
  double v = (score(model, y2, c12) - score(model, y2, c2)) +
             (score(model, y1, c12) - score(model, y1, c1));
  for (std::size_t i = 0; i < config.entry_count(); ++i) {
    const Point x = config.point(i);
    v += config.multiplicity(i) * ((score(model, x, c12) - score(model, x, c1)) -
                                   (score(model, x, c2) - score(model, x, config)));
  }
  return v;
}

bool verify_dnull(const ScoreModel& model, const PointConfiguration& config, const Point& x,
                  const Point& y, const Point& y1, const Point& y2) {
  const auto R = region(model, x, config);
  const double base = score(model, x, config);
  if (!R.contains(y)) {
    if (score(model, x, add(config, y)) - base != 0.0) return false;
  }
  if (!(R.contains(y1) && R.contains(y2))) {
    const auto c1 = add(config, y1);
    const auto c2 = add(config, y2);
    const double d2 = (score(model, x, add(c1, y2)) - score(model, x, c1)) -
                      (score(model, x, c2) - base);
    if (d2 != 0.0) return false;
  }
  return true;
}

std::vector<GridNode> main_grid(const ScoreModel& model, const IntensitySpec& intensity,
                                std::size_t per_axis) {
  if (per_axis == 0) throw std::invalid_argument("grid needs at least one cell per axis");
  const double q = model.p / 2.0;
  std::vector<GridNode> nodes;
  const std::size_t d = intensity.d;

  if (intensity.space == SpaceTag::lattice) {
    const Box& w = intensity.window;
    std::vector<double> lo(d), hi(d), site(d);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::ceil(w.lo[k]);
      hi[k] = std::floor(w.hi[k]);
    }
    site = lo;
    for (;;) {
      nodes.push_back({Point(site), intensity.s, 0.0});
      std::size_t k = d;
      bool done = true;
      while (k-- > 0) {
        if (site[k] < hi[k]) {
          site[k] += 1.0;
          done = false;
          break;
        }
        site[k] = lo[k];
      }
      if (done) break;
    }
  } else {
    const Box box = intensity.sampled_box();
    std::vector<double> width(d);
    double cell = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      width[k] = (box.hi[k] - box.lo[k]) / static_cast<double>(per_axis);
      cell *= width[k];
    }
    std::vector<std::size_t> idx(d, 0);
    for (;;) {
      std::vector<double> c(d);
      for (std::size_t k = 0; k < d; ++k) c[k] = box.lo[k] + (idx[k] + 0.5) * width[k];
      nodes.push_back({Point(std::move(c)), intensity.s * cell, 0.0});
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
  for (auto& n : nodes) {
    const double m = model.moment_bound(n.x.coords());
    if (m == 0.0) continue;
    n.c = std::pow(m, 4.0 + q) * (1.0 + std::pow(g_s(model, n.x.coords()), 5.0));
  }
  return nodes;
}

void assemble_main_bound(MainTheoremTerms& t) {
  const double v = t.var_F;
  if (!(v > 0.0)) {
    t.dW_bound = t.dK_bound = std::numeric_limits<double>::infinity();
    t.vacuous = true;
    return;
  }
  const double g = t.gamma_F;
  t.dW_bound = 12.0 * t.bracket_W / v + 2.0 * g / std::pow(v, 1.5);
  t.dK_bound = 12.0 * t.bracket_W / v + std::sqrt(g) / v + 2.0 * g / std::pow(v, 1.5) +
               (std::pow(g, 1.25) + 2.0 * std::pow(g, 1.5)) / (v * v) + 12.0 * t.bracket_K / v;
  t.vacuous = t.dK_bound > 1.0;
}

MainTheoremTerms estimate_main_terms(const ScoreModel& model, const IntensitySpec& intensity,
                                     const MainTermsSpec& spec) {
  model.validate();
  intensity.validate();
  if (model.s < 1.0) throw std::invalid_argument("estimate_main_terms: s must be >= 1");
  if (spec.n_reps == 0) throw std::invalid_argument("estimate_main_terms: zero replicates");
  if (intensity.d != model.d) throw std::invalid_argument("intensity dimension mismatch");

  MainTheoremTerms out;
  const double q = model.p / 2.0;
  out.q_exponent = q;
  out.nodes = main_grid(model, intensity, spec.grid_per_axis);
  const auto pair_nodes = main_grid(model, intensity, spec.pair_grid_per_axis);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < pair_nodes.size(); ++a) {
    for (std::size_t b = a; b < pair_nodes.size(); ++b) {
      if (intensity.space == SpaceTag::lattice) {
        double l1 = 0.0;
        for (std::size_t k = 0; k < model.d; ++k) {
          l1 += std::fabs(pair_nodes[a].x[k] - pair_nodes[b].x[k]);
        }
        if (l1 > spec.lattice_pair_range) continue;
      }
      pairs.emplace_back(a, b);
    }
  }

  const std::size_t n1 = out.nodes.size(), n2 = pairs.size();
  const auto reps = static_cast<std::size_t>(spec.n_reps);
  std::vector<std::uint8_t> flag1(reps * n1, 0), flag2(reps * n2, 0);
  std::vector<double> h0(reps);

  parallel_for(reps, [&](std::size_t r) {
    const auto config = sample_poisson(intensity, SeedSpec{spec.base_seed, r});
    const double base = H(model, config);
    h0[r] = base;
    for (std::size_t k = 0; k < n1; ++k) {
      flag1[r * n1 + k] = nonzero(H(model, add(config, out.nodes[k].x)) - base, base);
    }
    std::vector<double> single(pair_nodes.size());
    std::vector<PointConfiguration> added;
    added.reserve(pair_nodes.size());
    for (std::size_t a = 0; a < pair_nodes.size(); ++a) {
      added.push_back(add(config, pair_nodes[a].x));
      single[a] = H(model, added.back());
    }
    for (std::size_t k = 0; k < n2; ++k) {
      const auto [a, b] = pairs[k];
      const double both = H(model, add(added[a], pair_nodes[b].x));
      flag2[r * n2 + k] = nonzero((both - single[a]) - (single[b] - base), base);
    }
  });

  auto terms_for = [&](auto&& in_batch) {
    std::vector<double> p1(n1, 0.0), p2(n2, 0.0);
    double count = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      if (!in_batch(r)) continue;
      count += 1.0;
      for (std::size_t k = 0; k < n1; ++k) p1[k] += flag1[r * n1 + k];
      for (std::size_t k = 0; k < n2; ++k) p2[k] += flag2[r * n2 + k];
    }
    for (auto& v : p1) v /= count;
    for (auto& v : p2) v /= count;

    TermTriple t;
    for (std::size_t k = 0; k < n1; ++k) {
      const double c = out.nodes[k].c;
      if (c == 0.0 || p1[k] == 0.0) continue;
      t.gamma += out.nodes[k].weight * std::max(std::pow(c, 2.0 / (4.0 + q)), std::pow(c, 4.0 / (4.0 + q))) *
                 std::pow(p1[k], q / (8.0 + 2.0 * q));
    }
    // inner[b] = int c_{x1}^{2/(4+q)} P^{q/(16+4q)} nu(dx1) at x2 = node b.
    std::vector<double> inner(pair_nodes.size(), 0.0);
    double bk = 0.0;
    for (std::size_t k = 0; k < n2; ++k) {
      if (p2[k] == 0.0) continue;
      const auto [a, b] = pairs[k];
      auto add_ordered = [&](std::size_t x1, std::size_t x2) {
        const double c = pair_nodes[x1].c;
        if (c == 0.0) return;
        const double wa = pair_nodes[x1].weight, wb = pair_nodes[x2].weight;
        inner[x2] += wa * std::pow(c, 2.0 / (4.0 + q)) * std::pow(p2[k], q / (16.0 + 4.0 * q));
        bk += wa * wb * std::pow(c, 4.0 / (4.0 + q)) * std::pow(p2[k], q / (8.0 + 2.0 * q));
      };
      add_ordered(a, b);
      if (a != b) add_ordered(b, a);
    }
    double bw = 0.0;
    for (std::size_t b = 0; b < pair_nodes.size(); ++b) bw += pair_nodes[b].weight * inner[b] * inner[b];
    t.bw = std::sqrt(bw);
    t.bk = std::sqrt(bk);
    return t;
  };

  const auto all = terms_for([](std::size_t) { return true; });
  out.p_first.assign(n1, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t k = 0; k < n1; ++k) out.p_first[k] += flag1[r * n1 + k];
  }
  for (auto& v : out.p_first) v /= static_cast<double>(reps);
  out.gamma_F = all.gamma;
  out.bracket_W = all.bw;
  out.bracket_K = all.bk;

  const std::size_t B = std::min<std::size_t>(spec.batches, reps);
  if (B >= 2) {
    MeanAccumulator g, w, k;
    for (std::size_t b = 0; b < B; ++b) {
      const auto t = terms_for([&](std::size_t r) { return r % B == b; });
      g.add(t.gamma);
      w.add(t.bw);
      k.add(t.bk);
    }
    out.se_gamma_F = g.estimate().se;
    out.se_bracket_W = w.estimate().se;
    out.se_bracket_K = k.estimate().se;
  }

  MeanAccumulator v;
  for (double h : h0) v.add(h);
  out.var_F = v.variance();
  assemble_main_bound(out);
  return out;
}

}  // namespace regstab
