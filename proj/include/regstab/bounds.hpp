#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regstab/quadrature.hpp"
#include "regstab/scores.hpp"

namespace regstab {

/// Whether a returned quantity is the exact value or only an upper bound.
enum class ValueKind { value, bound };
std::string_view to_string(ValueKind kind);

/// c_{alpha,s}(y) = s * int_{x >= y, x in [0,1]^d} exp(-alpha s |x|) dx.
///
/// With u_i = -log x_i the integrand depends on u only through the sum of the
/// first d-1 coordinates, and the last axis integrates in closed form, so the
/// value is a one-dimensional integral of
///   phi(w) = exp(-a y_d e^{-w}) (1 - exp(-a (1 - y_d) e^{-w})),  a = alpha s,
/// against the density of the sum of d-1 uniforms on [0, -log y_i].
/// Dimensions above quad.max_dim_tensor are estimated by Monte Carlo.
double c_alpha_s(std::span<const double> y, double alpha, double s,
                 const QuadratureSpec& quad = {});
Estimate c_alpha_s_estimate(std::span<const double> y, double alpha, double s,
                            const QuadratureSpec& quad = {}, const McSpec& mc = {});
/// Plain Monte Carlo over the u-box; used as the oracle for the quadrature.
Estimate c_alpha_s_mc(std::span<const double> y, double alpha, double s, const McSpec& mc);

/// E F_s = s int_{[0,1]^d} exp(-s |x|) dx.
double mean_minimal(double s, std::size_t d, const QuadratureSpec& quad = {});

double kappa_s(const ScoreModel& model, std::span<const double> x);
ValueKind kappa_kind(const ScoreModel& model);

double g_s(const ScoreModel& model, std::span<const double> y,
           const QuadratureSpec& quad = {});
double G_s(const ScoreModel& model, std::span<const double> y,
           const QuadratureSpec& quad = {});

double q_s(const ScoreModel& model, std::span<const double> x1, std::span<const double> x2,
           const QuadratureSpec& quad = {});
ValueKind q_kind(const ScoreModel& model);

struct FAlphaValue {
  Estimate f1, f2, f3;
  double total() const { return f1.value + f2.value + f3.value; }
};

/// f_alpha and its three components at y. Minimal d = 2 and the lattice are
/// deterministic; other cases are Monte Carlo.
FAlphaValue f_alpha(const ScoreModel& model, std::span<const double> y, double alpha,
                    const QuadratureSpec& quad = {}, const McSpec& mc = {});

/// Components of f_alpha by Monte Carlo for the minimal model (any d <= 3).
FAlphaValue f_alpha_mc(const ScoreModel& model, std::span<const double> y, double alpha,
                       const QuadratureSpec& quad, const McSpec& mc);

/// The three integrals of the Kolmogorov bound.
struct OuterTerms {
  Estimate int_f_beta_sq;  // s Q f_beta^2
  Estimate int_f_2beta;    // s Q f_{2 beta}
  Estimate int_kg_G;       // s Q ((kappa + g)^{2 beta} G)
  std::string method;
};

OuterTerms outer_integrals(const ScoreModel& model, const QuadratureSpec& quad = {},
                           const McSpec& mc = {});

/// Uniform grid in u = -log x on [0, U]^2 carrying the minimal-model tables
/// (c_zeta, c_1, G) and the prefix/suffix sums that give f_alpha at every
/// node in O(N^2).
class MinimalGrid {
 public:
  MinimalGrid(double s, double p, double step, double tail);

  std::size_t size() const { return n_; }
  double u(std::size_t i) const { return static_cast<double>(i) * h_; }
  double step() const { return h_; }
  /// The same tables on every other node (step 2h); needs an odd size.
  MinimalGrid coarsened() const;

  struct FTables {
    std::vector<double> f1, f2, f3;
  };
  /// f_alpha components at every node (row-major, index i * size() + j).
  FTables f_tables(double alpha) const;

  /// s * int table(y) dy over [0,1]^2 by the trapezoid rule in u.
  double integrate(std::span<const double> table) const;

  std::span<const double> c_zeta() const { return c_zeta_; }
  std::span<const double> c_one() const { return c_one_; }
  std::span<const double> G() const { return G_; }
  /// Nodal values of (kappa + g)^{2 beta} G.
  std::vector<double> kg_G(double beta) const;

 private:
  MinimalGrid() = default;
  std::vector<double> c_table(double alpha) const;

  double s_ = 0.0, p_ = 1.0, h_ = 0.0;
  std::size_t n_ = 0;
  std::vector<double> c_zeta_, c_one_, G_;
};

/// Grid evaluation of the three integrals for minimal d = 2, with one
/// Richardson step between grid widths h and 2h.
OuterTerms minimal_outer_grid(double s, double p, const QuadratureSpec& quad = {});

/// Monte Carlo versions of s Q f_{2 beta} split by component, and of
/// s Q ((kappa + g)^{2 beta} G), for the minimal model.
struct MinimalMcTerms {
  Estimate int_f1, int_f2, int_f3, int_kg_G;
};
MinimalMcTerms minimal_outer_mc(double s, std::size_t d, double p, double alpha,
                                const QuadratureSpec& quad, const McSpec& mc);

/// Grid values of s Q f_alpha^{(k)}, k = 1, 2, 3, for minimal d = 2.
std::array<Estimate, 3> minimal_grid_f_integrals(double s, double p, double alpha,
                                                 const QuadratureSpec& quad = {});

struct BoundReport {
  std::string model;
  double s = 0.0;
  std::size_t d = 0;
  double p = 1.0;
  double zeta = 0.0;
  double beta = 0.0;
  OuterTerms terms;
  double var = 0.0;
  std::string var_source;
  double dW_norm = 0.0;
  double dK_norm = 0.0;
  ValueKind kappa_kind = ValueKind::value;
  ValueKind q_kind = ValueKind::value;

  std::string to_json() const;
};

/// Plugs the integrals into the Wasserstein and Kolmogorov displays with
/// the unspecified constant set to one.
BoundReport assemble_bound(const ScoreModel& model, const OuterTerms& terms, double var,
                           std::string var_source = "mecke");

/// Var H for the lattice model on an infinite lattice (exact finite sum).
double variance_lattice_exact(const ScoreModel& model);

/// W_{i,s} = s int w_s(x)^i dx for the rgg model.
double rgg_weight_moment(const ScoreModel& model, int i, const QuadratureSpec& quad = {});

/// E H_s = s int w_s(x) P{x isolated} dx for the rgg model.
double rgg_mean(const ScoreModel& model, const QuadratureSpec& quad = {});

}  // namespace regstab
