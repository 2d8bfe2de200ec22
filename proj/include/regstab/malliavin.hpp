#pragma once

#include <cstdint>
#include <vector>

#include "regstab/configuration.hpp"
#include "regstab/sampling.hpp"
#include "regstab/scores.hpp"

namespace regstab {

struct DifferenceValue {
  double value = 0.0;
  int order = 1;
  std::vector<Point> at_points;
};

/// D_y H(config) = H(config + delta_y) - H(config), by two full evaluations.
DifferenceValue diff1(const ScoreModel& model, const PointConfiguration& config, const Point& y);

/// D^2_{y1,y2} H(config) from the four-term inclusion-exclusion.
DifferenceValue diff2(const ScoreModel& model, const PointConfiguration& config, const Point& y1,
                      const Point& y2);

/// Right-hand sides of the add-one decomposition, evaluated score by score:
///   D_y H = xi(y, mu + delta_y) + sum_{x in mu} D_y xi(x, mu)
///   D^2 H = D_{y1} xi(y2, mu + delta_{y2}) + D_{y2} xi(y1, mu + delta_{y1})
///           + sum_{x in mu} D^2_{y1,y2} xi(x, mu)
double diff1_by_scores(const ScoreModel& model, const PointConfiguration& config, const Point& y);
double diff2_by_scores(const ScoreModel& model, const PointConfiguration& config, const Point& y1,
                       const Point& y2);

/// With config already containing x: D_y xi(x, config) = 0 when y lies outside
/// R(x, config), and D^2_{y1,y2} xi(x, config) = 0 when {y1, y2} is not inside
/// it. Returns whether both implications hold.
bool verify_dnull(const ScoreModel& model, const PointConfiguration& config, const Point& x,
                  const Point& y, const Point& y1, const Point& y2);

struct MainTermsSpec {
  std::size_t grid_per_axis = 32;       // first-order grid, cells per axis
  std::size_t pair_grid_per_axis = 8;   // pair grid, cells per axis
  std::uint64_t n_reps = 200;
  std::uint64_t base_seed = 1;
  std::size_t batches = 10;             // for the standard errors
  double lattice_pair_range = 4.0;      // L1 range of lattice pairs
};

struct GridNode {
  Point x;
  double weight = 0.0;  // nu-mass of the cell
  double c = 0.0;       // moment bound c_x
};

struct MainTheoremTerms {
  double q_exponent = 0.0;
  std::vector<GridNode> nodes;  // first-order grid with c_x
  std::vector<double> p_first;  // P{D_x F != 0} per node
  double gamma_F = 0.0;
  double bracket_W = 0.0;
  double bracket_K = 0.0;
  double var_F = 0.0;  // empirical variance over the replicates
  double se_gamma_F = 0.0;
  double se_bracket_W = 0.0;
  double se_bracket_K = 0.0;
  double dW_bound = 0.0;
  double dK_bound = 0.0;
  bool vacuous = false;  // dK bound above one
};

/// Monte Carlo estimate of the ingredients of the main abstract bound, with
/// q = p / 2 and c_x = M(x)^{4+q} (1 + g_s(x)^5).
MainTheoremTerms estimate_main_terms(const ScoreModel& model, const IntensitySpec& intensity,
                                     const MainTermsSpec& spec = {});

/// Cells of the first-order or pair grid for a model and intensity.
std::vector<GridNode> main_grid(const ScoreModel& model, const IntensitySpec& intensity,
                                std::size_t per_axis);

/// Plugs the three integrals into the two displays of the main bound.
void assemble_main_bound(MainTheoremTerms& terms);

}  // namespace regstab
