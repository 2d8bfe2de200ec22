// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "regstab/bounds.hpp"
#include "regstab/empirics.hpp"
#include "regstab/scores.hpp"
#include "suite.hpp"

using namespace regstab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0,
                double e = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
  return buf;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

// Runs the named property checks; all must pass.
Verdict run_checks(const std::vector<std::string>& descriptions) {
  std::ostringstream tap;
  checks::Options options;
  int failures = 0, ran = 0;
  for (const auto& c : checks::all_checks()) {
    if (std::find(descriptions.begin(), descriptions.end(), c.description) == descriptions.end()) {
      continue;
    }
    ++ran;
    const auto r = c.run(options);
    if (!r.ok) {
      ++failures;
      tap << " [" << c.description << ": " << r.detail << "]";
    }
  }
  if (ran != static_cast<int>(descriptions.size())) return {false, "missing checks"};
  return {failures == 0, std::to_string(ran) + " properties, " + std::to_string(failures) +
                             " failing" + tap.str()};
}

Verdict exactness() {
  return run_checks({"score is unchanged by restriction to its region",
                     "regions shrink as the configuration grows",
                     "equal scores at two nested configurations persist in between",
                     "first-order difference decomposes into scores",
                     "second-order difference decomposes into scores",
                     "second-order difference is symmetric",
                     "score differences vanish outside the region"});
}

Verdict skyline() { return run_checks({"fast skyline count equals brute force"}); }

Verdict inequalities() {
  return run_checks({"c_{alpha,s} scaling identity on a 1000-point grid",
                     "|a^y||b^y| <= |a^b^y||y| on dyadic triples",
                     "c_{1,s}^alpha <= exp(-alpha s|x|) + c_{alpha,s}",
                     "c-bound ratio stays below one with slowing growth in s"});
}

Verdict mean_check() {
  bool ok = true;
  std::string detail;
  std::vector<double> per_log;
  std::uint64_t seed = 400;
  for (double s : {1e2, 1e3, 1e4}) {
    const auto ens = run_ensemble(minimal_model(s, 2), IntensitySpec::cube(s, 2), 1000, seed++);
    const double m = mean_minimal(s, 2);
    const double z = (ens.mean - m) / ens.se_mean;
    ok = ok && std::fabs(z) <= 4.0;
    per_log.push_back(m / std::log(s));
    detail += fmt("s=%g: %.3f vs %.3f (z=%.2f); ", s, ens.mean, m, z);
  }
  const double sp = spread(per_log);
  ok = ok && sp <= 0.25;
  detail += fmt("mean/log s spread %.3f", sp);
  return {ok, detail};
}

struct MinimalSweep {
  std::vector<double> s;
  std::vector<EnsembleSummary> runs;
};

const MinimalSweep& minimal_sweep() {
  static const MinimalSweep sweep = [] {
    MinimalSweep out;
    std::uint64_t seed = 500;
    for (double s : {1e2, 1e3, 1e4, 1e5}) {
      out.s.push_back(s);
      out.runs.push_back(run_ensemble(minimal_model(s, 2), IntensitySpec::cube(s, 2), 5000, seed++));
    }
    return out;
  }();
  return sweep;
}

Verdict variance_order() {
  const auto& sw = minimal_sweep();
  std::vector<std::pair<double, double>> pts;
  std::string detail;
  for (std::size_t i = 0; i < sw.s.size(); ++i) {
    pts.emplace_back(sw.s[i], sw.runs[i].var);
    detail += fmt("Var(%g)=%.3f+-%.3f; ", sw.s[i], sw.runs[i].var, sw.runs[i].se_var);
  }
  const auto fit = scaling_fit(pts);
  const double mecke = variance_mecke_minimal(1e2);
  const double z = (mecke - sw.runs[0].var) / sw.runs[0].se_var;
  detail += fmt("gamma=%.3f r2=%.3f; Mecke(100)=%.4f (z=%.2f)", fit.gamma, fit.r_squared, mecke, z);
  const bool ok = fit.gamma >= 0.7 && fit.gamma <= 1.3 && fit.r_squared >= 0.9 && std::fabs(z) <= 4.0;
  return {ok, detail};
}

// Standard error of dK from ten interleaved batches, scaled to the full sample.
double dk_standard_error(const std::vector<double>& samples) {
  const std::size_t B = 10;
  MeanAccumulator acc;
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<double> part;
    for (std::size_t i = b; i < samples.size(); i += B) part.push_back(samples[i]);
    MeanAccumulator m;
    for (double v : part) m.add(v);
    for (double& v : part) v = (v - m.mean()) / std::sqrt(m.variance());
    acc.add(ks_distance(part));
  }
  return std::sqrt(acc.variance() / B);
}

Verdict rate_check() {
  const auto& sw = minimal_sweep();
  std::vector<double> dk, se;
  std::vector<std::pair<double, double>> pts;
  std::string detail;
  for (std::size_t i = 0; i < sw.s.size(); ++i) {
    dk.push_back(sw.runs[i].dK_emp);
    se.push_back(dk_standard_error(sw.runs[i].samples));
    pts.emplace_back(sw.s[i], dk.back());
    detail += fmt("dK(%g)=%.4f+-%.4f; ", sw.s[i], dk.back(), se.back());
  }
  int inversions = 0;
  bool within = true;
  for (std::size_t i = 1; i < dk.size(); ++i) {
    if (dk[i] > dk[i - 1]) {
      ++inversions;
      within = within && dk[i] - dk[i - 1] <= 2.0 * std::hypot(se[i], se[i - 1]);
    }
  }
  const auto fit = scaling_fit(pts);
  detail += fmt("inversions=%g, exponent %.3f (target -0.5 +- 0.5)", inversions, fit.gamma);
  const bool ok = inversions <= 1 && within && std::fabs(fit.gamma + 0.5) <= 0.5;
  return {ok, detail};
}

Verdict kolbd_terms() {
  std::vector<double> t1, t2, t3;
  std::string detail;
  bool cross = true;
  const double beta = minimal_model(100.0, 2).beta();
  for (double s : {1e2, 1e3, 1e4}) {
    const auto terms = minimal_outer_grid(s, 1.0);
    const double l = std::log(s);
    t1.push_back(terms.int_f_beta_sq.value / l);
    t2.push_back(terms.int_f_2beta.value / l);
    t3.push_back(terms.int_kg_G.value / l);
    detail += fmt("s=%g: %.3g %.3g %.3g; ", s, t1.back(), t2.back(), t3.back());
  }
  // Monte Carlo cross-checks at s = 100: the f_{2 beta} components and the G term.
  const double s = 100.0;
  McSpec mc;
  mc.n_samples = 20000;
  mc.base_seed = 700;
  const auto mcs = minimal_outer_mc(s, 2, 1.0, 2.0 * beta, {}, mc);
  const auto grid = minimal_grid_f_integrals(s, 1.0, 2.0 * beta);
  const auto g3 = minimal_outer_grid(s, 1.0).int_kg_G;
  const Estimate mc_parts[] = {mcs.int_f1, mcs.int_f2, mcs.int_f3, mcs.int_kg_G};
  const Estimate grid_parts[] = {grid[0], grid[1], grid[2], g3};
  for (int k = 0; k < 4; ++k) {
    const double z = (grid_parts[k].value - mc_parts[k].value) /
                     std::hypot(mc_parts[k].se, grid_parts[k].se);
    cross = cross && std::fabs(z) <= 4.0;
    detail += fmt("xcheck%g z=%.2f; ", k + 1, z);
  }
  // Pointwise f_beta against its Monte Carlo value at grid nodes.
  McSpec fm;
  fm.n_samples = 20000;
  fm.base_seed = 710;
  const auto model = minimal_model(s, 2);
  for (const auto& y : std::vector<std::vector<double>>{{0.05, 0.3}, {0.2, 0.2}}) {
    const auto det = f_alpha(model, y, beta);
    const auto est = f_alpha_mc(model, y, beta, {}, fm);
    const double se = std::sqrt(est.f1.se * est.f1.se + est.f2.se * est.f2.se + est.f3.se * est.f3.se);
    const double z = (det.total() - est.total()) / se;
    cross = cross && std::fabs(z) <= 4.0;
    detail += fmt("f_beta z=%.2f; ", z);
  }
  const double s1 = spread(t1), s2 = spread(t2), s3 = spread(t3);
  detail += fmt("spreads %.3g %.3g %.3g (limit 0.5)", s1, s2, s3);
  return {cross && s1 <= 0.5 && s2 <= 0.5 && s3 <= 0.5, detail};
}

Verdict lattice_example() {
  bool ok = true;
  std::string detail;
  std::vector<double> dk;
  const double floor_const = std::exp(-4.0) - 4.0 * std::exp(-8.0);
  std::uint64_t seed = 800;
  for (int n : {5, 10, 20}) {
    const auto m = lattice_model(n);
    const auto ens = run_ensemble(m, default_intensity(m), 1000, seed++);
    const double w = (2.0 * n + 1) * (2.0 * n + 1);  // W_1 = W_2 for an indicator weight
    const double z = (ens.mean - std::exp(-4.0) * w) / ens.se_mean;
    const double ratio = ens.var / w, ratio_se = ens.se_var / w;
    ok = ok && std::fabs(z) <= 4.0 && ratio >= floor_const - 4.0 * ratio_se;
    dk.push_back(ens.dK_emp);
    detail += fmt("n=%g: mean z=%.2f, Var/W2=%.4f (floor %.4f), dK=%.4f; ", n, z, ratio,
                  floor_const, ens.dK_emp);
  }
  ok = ok && dk[0] > dk[1] && dk[1] > dk[2];
  return {ok, detail};
}

Verdict rgg_example() {
  bool ok = true;
  std::string detail;
  const double s = 20.0;
  const auto m = rgg_model(s, 2, rgg_log_regime_radius(s, 2));
  const double regime = s * m.rho * m.rho - 3.0 / (2.0 * unit_ball_volume(2)) * std::log(s);
  const auto ens = run_ensemble(m, default_intensity(m), 200, 900);
  const double ref = rgg_mean(m);
  const double z = (ens.mean - ref) / ens.se_mean;
  ok = ok && std::fabs(z) <= 4.0 && regime < 0.0;
  detail += fmt("s rho^2 - 3 log s/(2 k2) = %.3f; mean %.2f vs %.2f (z=%.2f); ", regime, ens.mean,
                ref, z);
  for (int i : {1, 2}) {
    std::vector<double> ratios;
    for (double sv : {10.0, 20.0, 40.0, 80.0}) {
      const auto mv = rgg_model(sv, 2, rgg_log_regime_radius(sv, 2));
      ratios.push_back(rgg_weight_moment(mv, i) / std::pow(sv, 3.0));
    }
    const double sp = spread(ratios);
    ok = ok && sp <= 0.25;
    detail += fmt("W_%g/s^3 spread %.2e; ", i, sp);
  }
  return {ok, detail};
}

Verdict determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "region_stabilize_acceptance";
  fs::create_directories(dir);
  const char* old = std::getenv("REGION_STABILIZE_THREADS");
  const std::string saved = old ? old : "";
  auto run_with = [&](const char* threads, const std::string& tag) {
    setenv("REGION_STABILIZE_THREADS", threads, 1);
    const std::string out = (dir / ("samples_" + tag + ".csv")).string();
    const std::string summary = (dir / ("summary_" + tag + ".json")).string();
    std::vector<std::string> args = {"region_stabilize", "simulate", "--model", "minimal", "--d",
                                     "2", "--s", "1000", "--reps", "100", "--seed", "42",
                                     "--out", out, "--summary", summary};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream sink;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), sink, sink);
    std::ifstream is(out, std::ios::binary);
    std::stringstream content;
    content << is.rdbuf();
    return std::make_pair(code, content.str());
  };
  const auto a = run_with("1", "a");
  const auto b = run_with("1", "b");
  const auto c = run_with("8", "c");
  if (old) {
    setenv("REGION_STABILIZE_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("REGION_STABILIZE_THREADS");
  }
  const auto rows = std::count(a.second.begin(), a.second.end(), '\n') - 1;
  const bool ok = a.first == 0 && b.first == 0 && c.first == 0 && !a.second.empty() &&
                  a.second == b.second && a.second == c.second && rows == 100;
  return {ok, fmt("%g data rows; identical across reruns and 1 vs 8 threads: ", static_cast<double>(rows)) +
                  (a.second == b.second && a.second == c.second ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, exactness},    {2, skyline},        {3, inequalities}, {4, mean_check},
      {5, variance_order}, {6, rate_check},   {7, kolbd_terms},  {8, lattice_example},
      {9, rgg_example},  {10, determinism},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << fmt("%.1f", secs)
              << " s): " << v.detail << std::endl;
    failures += !v.pass;
  }
  return failures;
}
