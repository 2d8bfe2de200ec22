#include "regstab/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "regstab/skyline.hpp"

namespace regstab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool model_dominates(const ScoreModel& model, std::span<const double> x,
                     std::span<const double> y) {
  return model.strict_dominance_fault ? dominates_strictly(x, y) : dominates(x, y);
}

// Offsets of the lattice neighbours x + B.
constexpr std::array<std::array<double, 2>, 4> kNeighbours{
    {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}};

bool lattice_isolated(std::span<const double> x, const PointConfiguration& config) {
  std::array<double, 2> nb{};
  for (const auto& off : kNeighbours) {
    nb = {x[0] + off[0], x[1] + off[1]};
    if (config.multiplicity_of(nb) > 0) return false;
  }
  return true;
}

// Another point of config (not counting one copy of x) within distance rho.
bool rgg_has_neighbour(const ScoreModel& model, std::span<const double> x,
                       const PointConfiguration& config) {
  const double r2 = model.rho * model.rho;
  for (std::size_t j = 0; j < config.entry_count(); ++j) {
    auto q = config.coords(j);
    if (std::equal(q.begin(), q.end(), x.begin())) {
      if (config.multiplicity(j) >= 2) return true;
      continue;
    }
    if (distance_sq(q, x) <= r2) return true;
  }
  return false;
}

void require_member(const Point& x, const PointConfiguration& config) {
  if (x.dim() != config.dim() || !config.contains(x)) {
    throw std::invalid_argument("score: x is not a point of the configuration");
  }
}

// Uniform grid of cell width rho over the entries of a configuration.
class CellIndex {
 public:
  CellIndex(const PointConfiguration& config, double width)
      : config_(config), d_(config.dim()), width_(width) {
    const std::size_t n = config.entry_count();
    lo_.assign(d_, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d_, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
      auto c = config.coords(i);
      for (std::size_t k = 0; k < d_; ++k) {
        lo_[k] = std::min(lo_[k], c[k]);
        hi[k] = std::max(hi[k], c[k]);
      }
    }
    extent_.assign(d_, 1);
    for (std::size_t k = 0; k < d_ && n > 0; ++k) {
      extent_[k] = static_cast<long>(std::floor((hi[k] - lo_[k]) / width_)) + 1;
    }
    keyed_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) keyed_.emplace_back(key_of(config.coords(i)), i);
    std::sort(keyed_.begin(), keyed_.end());
  }

  template <class Fn>
  void for_each_near(std::span<const double> x, Fn&& fn) const {
    std::vector<long> cell(d_), off(d_, -1);
    for (std::size_t k = 0; k < d_; ++k) {
      cell[k] = static_cast<long>(std::floor((x[k] - lo_[k]) / width_));
    }
    for (;;) {
      bool inside = true;
      std::uint64_t key = 0;
      for (std::size_t k = 0; k < d_; ++k) {
        const long c = cell[k] + off[k];
        if (c < 0 || c >= extent_[k]) {
          inside = false;
          break;
        }
        key = key * static_cast<std::uint64_t>(extent_[k]) + static_cast<std::uint64_t>(c);
      }
      if (inside) {
        auto it = std::lower_bound(keyed_.begin(), keyed_.end(),
                                   std::make_pair(key, std::size_t{0}));
        for (; it != keyed_.end() && it->first == key; ++it) fn(it->second);
      }
      std::size_t k = 0;
      while (k < d_ && off[k] == 1) off[k++] = -1;
      if (k == d_) return;
      ++off[k];
    }
  }

 private:
  std::uint64_t key_of(std::span<const double> x) const {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < d_; ++k) {
      const auto c = static_cast<std::uint64_t>(std::floor((x[k] - lo_[k]) / width_));
      key = key * static_cast<std::uint64_t>(extent_[k]) + c;
    }
    return key;
  }

  const PointConfiguration& config_;
  std::size_t d_;
  double width_;
  std::vector<double> lo_;
  std::vector<long> extent_;
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed_;
};

}  // namespace

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::minimal:
      return "minimal";
    case ModelTag::lattice_isolated:
      return "lattice";
    case ModelTag::rgg_isolated:
      return "rgg";
  }
  return "unknown";
}

ModelTag parse_model_tag(std::string_view name) {
  if (name == "minimal") return ModelTag::minimal;
  if (name == "lattice" || name == "lattice_isolated") return ModelTag::lattice_isolated;
  if (name == "rgg" || name == "rgg_isolated") return ModelTag::rgg_isolated;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

double unit_ball_volume(std::size_t d) {
  const double h = 0.5 * static_cast<double>(d);
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double ScoreModel::weight(std::span<const double> x) const {
  switch (tag) {
    case ModelTag::minimal:
      return 1.0;
    case ModelTag::lattice_isolated:
      return lattice_weight ? lattice_weight(x) : 1.0;
    case ModelTag::rgg_isolated: {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      return radial_weight ? radial_weight(std::sqrt(r2)) : 1.0;
    }
  }
  return 0.0;
}

void ScoreModel::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  if (!std::isfinite(s) || s < 0.0) throw std::invalid_argument("s must be finite and >= 0");
  if (tag == ModelTag::lattice_isolated && d != 2) {
    throw std::invalid_argument("the lattice model lives on Z^2");
  }
  if (tag == ModelTag::rgg_isolated && !(rho > 0.0)) {
    throw std::invalid_argument("rgg model needs rho > 0");
  }
}

ScoreModel minimal_model(double s, std::size_t d, double p) {
  ScoreModel m;
  m.tag = ModelTag::minimal;
  m.s = s;
  m.d = d;
  m.p = p;
  m.weight_support = Box::unit(d);
  m.validate();
  return m;
}

ScoreModel lattice_model(int n) {
  if (n < 0) throw std::invalid_argument("lattice half-width must be >= 0");
  const double h = n;
  return lattice_model(
      [h](std::span<const double> x) {
        return (std::fabs(x[0]) <= h && std::fabs(x[1]) <= h) ? 1.0 : 0.0;
      },
      Box::centered(2, h));
}

ScoreModel lattice_model(std::function<double(std::span<const double>)> weight,
                         Box support) {
  ScoreModel m;
  m.tag = ModelTag::lattice_isolated;
  m.s = 1.0;
  m.d = 2;
  m.p = 1.0;
  m.lattice_weight = std::move(weight);
  m.weight_support = std::move(support);
  m.validate();
  return m;
}

ScoreModel rgg_model(double s, std::size_t d, double rho) {
  return rgg_model(
      s, d, rho, [s](double r) { return r < s ? std::log(s / r) : 0.0; }, s);
}

ScoreModel rgg_model(double s, std::size_t d, double rho,
                     std::function<double(double)> radial_weight, double support_radius) {
  ScoreModel m;
  m.tag = ModelTag::rgg_isolated;
  m.s = s;
  m.d = d;
  m.p = 1.0;
  m.rho = rho;
  m.radial_weight = std::move(radial_weight);
  m.weight_support = Box::centered(d, support_radius);
  m.validate();
  return m;
}

double rgg_log_regime_radius(double s, std::size_t d) {
  if (!(s > 1.0)) throw std::invalid_argument("rgg regime radius needs s > 1");
  return std::pow(std::log(s) / (unit_ball_volume(d) * s), 1.0 / static_cast<double>(d));
}

IntensitySpec default_intensity(const ScoreModel& model) {
  switch (model.tag) {
    case ModelTag::minimal:
      return IntensitySpec::cube(model.s, model.d);
    case ModelTag::lattice_isolated:
      return IntensitySpec::lattice(model.s, model.weight_support.expanded(1.0));
    case ModelTag::rgg_isolated:
      return IntensitySpec::euclidean(model.s, model.weight_support, model.rho);
  }
  throw std::logic_error("default_intensity: unknown model");
}

double score(const ScoreModel& model, const Point& x, const PointConfiguration& config) {
  require_member(x, config);
  auto xc = x.coords();
  switch (model.tag) {
    case ModelTag::minimal: {
      const auto self = *config.find(xc);
      if (config.multiplicity(self) >= 2 && model_dominates(model, xc, xc)) return 0.0;
      for (std::size_t j = 0; j < config.entry_count(); ++j) {
        if (j == self) continue;
        if (model_dominates(model, xc, config.coords(j))) return 0.0;
      }
      return 1.0;
    }
    case ModelTag::lattice_isolated:
      return lattice_isolated(xc, config) ? model.weight(xc) : 0.0;
    case ModelTag::rgg_isolated:
      return rgg_has_neighbour(model, xc, config) ? 0.0 : model.weight(xc);
  }
  return 0.0;
}

RegionDescriptor region(const ScoreModel& model, const Point& x,
                        const PointConfiguration& config) {
  require_member(x, config);
  auto xc = x.coords();
  switch (model.tag) {
    case ModelTag::minimal: {
      // mu([0,x] \ {x}) = 0 with mu = config - delta_x.
      for (std::size_t j = 0; j < config.entry_count(); ++j) {
        auto q = config.coords(j);
        if (std::equal(q.begin(), q.end(), xc.begin())) continue;
        if (dominates(xc, q)) return RegionDescriptor::empty();
      }
      return RegionDescriptor::box_to_origin(x);
    }
    case ModelTag::lattice_isolated:
      return lattice_isolated(xc, config) ? RegionDescriptor::neighbor_set(x)
                                          : RegionDescriptor::empty();
    case ModelTag::rgg_isolated:
      return rgg_has_neighbour(model, xc, config) ? RegionDescriptor::empty()
                                                  : RegionDescriptor::ball(x, model.rho);
  }
  return RegionDescriptor::empty();
}

double rate(const ScoreModel& model, const Point& x, const Point& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("rate: dimension mismatch");
  switch (model.tag) {
    case ModelTag::minimal:
      return dominates(x.coords(), y.coords()) ? model.s * box_volume(x.coords()) : kInf;
    case ModelTag::lattice_isolated:
      return RegionDescriptor::neighbor_set(x).contains(y) ? 4.0 * model.s : kInf;
    case ModelTag::rgg_isolated:
      return distance_sq(x.coords(), y.coords()) <= model.rho * model.rho
                 ? unit_ball_volume(model.d) * model.s *
                       std::pow(model.rho, static_cast<double>(model.d))
                 : kInf;
  }
  return kInf;
}

double statistic_by_scores(const ScoreModel& model, const PointConfiguration& config) {
  double total = 0.0;
  for (std::size_t i = 0; i < config.entry_count(); ++i) {
    total += config.multiplicity(i) * score(model, config.point(i), config);
  }
  return total;
}

StatisticValue statistic(const ScoreModel& model, const PointConfiguration& config) {
  StatisticValue out;
  out.point_count = config.mass();
  if (config.empty()) return out;

  switch (model.tag) {
    case ModelTag::minimal: {
      if (model.strict_dominance_fault) {
        for (std::size_t i = 0; i < config.entry_count(); ++i) {
          const double v = config.multiplicity(i) * score(model, config.point(i), config);
          out.value += v;
          out.scored_count += v != 0.0 ? config.multiplicity(i) : 0;
        }
        return out;
      }
      const auto flags =
          minimal_flags_sorted(config.flat_coords(), config.multiplicities(), config.dim());
      out.scored_count = static_cast<std::uint64_t>(std::count(flags.begin(), flags.end(), 1));
      out.value = static_cast<double>(out.scored_count);
      return out;
    }
    case ModelTag::lattice_isolated: {
      for (std::size_t i = 0; i < config.entry_count(); ++i) {
        auto x = config.coords(i);
        const double w = model.weight(x);
        if (w == 0.0 || !lattice_isolated(x, config)) continue;
        out.value += config.multiplicity(i) * w;
        out.scored_count += config.multiplicity(i);
      }
      return out;
    }
    case ModelTag::rgg_isolated: {
      const CellIndex cells(config, model.rho);
      const double r2 = model.rho * model.rho;
      for (std::size_t i = 0; i < config.entry_count(); ++i) {
        if (config.multiplicity(i) >= 2) continue;
        auto x = config.coords(i);
        const double w = model.weight(x);
        if (w == 0.0) continue;
        bool isolated = true;
        cells.for_each_near(x, [&](std::size_t j) {
          if (j != i && distance_sq(config.coords(j), x) <= r2) isolated = false;
        });
        if (!isolated) continue;
        out.value += w;
        ++out.scored_count;
      }
      return out;
    }
  }
  return out;
}

}  // namespace regstab
