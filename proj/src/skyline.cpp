#include "regstab/skyline.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace regstab {
namespace {

// Staircase of the 2-d minimal elements seen so far: key y, value z, with z
// strictly decreasing as y increases.
class Staircase {
 public:
  // Some stored (y', z') has y' <= y and z' <= z.
  bool dominates(double y, double z) const {
    auto it = steps_.upper_bound(y);
    if (it == steps_.begin()) return false;
    --it;
    return it->second <= z;
  }

  // Inserts a point known not to be dominated.
  void insert(double y, double z) {
    auto it = steps_.lower_bound(y);
    while (it != steps_.end() && it->second >= z) it = steps_.erase(it);
    steps_[y] = z;
  }

 private:
  std::map<double, double> steps_;
};

// Core sweep over lexicographically sorted distinct rows. `dominated_before`
// tells whether some earlier row is <= the current one in every coordinate;
// earlier rows always have a smaller-or-equal first coordinate.
std::vector<std::uint8_t> sweep(std::span<const double> flat,
                                std::span<const std::uint32_t> mult, std::size_t d) {
  const std::size_t n = mult.size();
  std::vector<std::uint8_t> flags(n, 0);
  auto row = [&](std::size_t i) { return flat.subspan(i * d, d); };

  if (d == 1) {
    if (n > 0) flags[0] = mult[0] == 1;
    return flags;
  }

  if (d == 2) {
    double min_y = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double y = flat[i * 2 + 1];
      const bool dominated = min_y <= y;
      flags[i] = !dominated && mult[i] == 1;
      min_y = std::min(min_y, y);
    }
    return flags;
  }

  if (d == 3) {
    Staircase stairs;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = flat[i * 3 + 1];
      const double z = flat[i * 3 + 2];
      if (stairs.dominates(y, z)) continue;
      flags[i] = mult[i] == 1;
      stairs.insert(y, z);
    }
    return flags;
  }

  // d >= 4: any earlier row below the current one is itself above some row
  // of the running skyline, so testing the skyline suffices.
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < n; ++i) {
    auto p = row(i);
    bool dominated = false;
    for (std::size_t j : window) {
      auto q = row(j);
      bool below = true;
      for (std::size_t k = 1; k < d; ++k) {
        if (q[k] > p[k]) {
          below = false;
          break;
        }
      }
      if (below) {
        dominated = true;
        break;
      }
    }
    if (dominated) continue;
    flags[i] = mult[i] == 1;
    window.push_back(i);
  }
  return flags;
}

}  // namespace

std::vector<std::uint8_t> minimal_flags_sorted(std::span<const double> flat,
                                               std::span<const std::uint32_t> mult,
                                               std::size_t d) {
  if (d == 0 || flat.size() != mult.size() * d) {
    throw std::invalid_argument("minimal_flags_sorted: shape mismatch");
  }
  return sweep(flat, mult, d);
}

std::size_t count_minimal_fast(std::span<const double> flat, std::size_t d) {
  if (d == 0 || flat.size() % d != 0) {
    throw std::invalid_argument("count_minimal_fast: shape mismatch");
  }
  const std::size_t n = flat.size() / d;
  if (n == 0) return 0;

  std::vector<double> sorted;
  std::vector<std::uint32_t> mult;
  sorted.reserve(flat.size());
  mult.reserve(n);

  if (d == 2) {
    std::vector<std::array<double, 2>> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = {flat[2 * i], flat[2 * i + 1]};
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && pts[i] == pts[i - 1]) {
        ++mult.back();
        continue;
      }
      sorted.push_back(pts[i][0]);
      sorted.push_back(pts[i][1]);
      mult.push_back(1);
    }
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto row = [&](std::size_t i) { return flat.subspan(i * d, d); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      auto ra = row(a), rb = row(b);
      return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    for (std::size_t k = 0; k < n; ++k) {
      auto r = row(order[k]);
      if (k > 0) {
        auto prev = row(order[k - 1]);
        if (std::equal(r.begin(), r.end(), prev.begin())) {
          ++mult.back();
          continue;
        }
      }
      sorted.insert(sorted.end(), r.begin(), r.end());
      mult.push_back(1);
    }
  }

  const auto flags = sweep(sorted, mult, d);
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
}

}  // namespace regstab
