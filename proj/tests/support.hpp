#pragma once

// Shared helpers for the test suites: world builders, independent oracles
// (Kolmogorov-Smirnov statistic, chi-square critical values, brute-force
// rasterized free area), and small utilities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fss/environment.hpp"
#include "fss/geometry.hpp"
#include "fss/rng.hpp"

namespace testsupport {

inline fss::HyperRect unit_square() {
  return fss::HyperRect({0.0, 0.0}, {1.0, 1.0});
}

inline fss::Environment empty_world() { return {unit_square(), {}}; }

// Axis-aligned obstacle covering the central quarter of the unit square;
// edges sit on multiples of 1/64, so 64x64 grid cells are never straddled.
inline fss::Environment quarter_world() {
  return {unit_square(),
          {fss::AabbObstacle{fss::HyperRect({0.25, 0.25}, {0.75, 0.75})}}};
}

inline fss::Environment blocked_world() {
  return {unit_square(), {fss::AabbObstacle{unit_square()}}};
}

// A fixed-seed world of `count` random boxes in the unit square.
inline fss::Environment random_box_world(std::uint64_t seed, int count) {
  fss::RandomStream rng(seed);
  std::vector<fss::Obstacle> obstacles;
  for (int k = 0; k < count; ++k) {
    const double cx = rng.uniform(0.1, 0.9);
    const double cy = rng.uniform(0.1, 0.9);
    const double hx = rng.uniform(0.02, 0.15);
    const double hy = rng.uniform(0.02, 0.15);
    obstacles.push_back(fss::AabbObstacle{
        fss::HyperRect({std::max(0.0, cx - hx), std::max(0.0, cy - hy)},
                       {std::min(1.0, cx + hx), std::min(1.0, cy + hy)})});
  }
  return {unit_square(), std::move(obstacles)};
}

// Two-sided Kolmogorov-Smirnov distance of values against uniform [lo, hi].
inline double ks_statistic(std::vector<double> values, double lo, double hi) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = (values[i] - lo) / (hi - lo);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Wilson-Hilferty approximation of the chi-square quantile at normal score z.
inline double chi2_quantile(double df, double z) {
  const double a = 2.0 / (9.0 * df);
  const double t = 1.0 - a + z * std::sqrt(a);
  return df * t * t * t;
}

// Brute-force free-area oracle: tests the midpoints of a res x res raster of
// `cell` against the obstacle list. Error is O(total obstacle perimeter / res).
inline double rasterized_free_area(const fss::Environment& env,
                                   const fss::HyperRect& cell, int res) {
  const double w0 = cell.side(0) / res;
  const double w1 = cell.side(1) / res;
  std::int64_t free = 0;
  fss::Point p(2);
  for (int iy = 0; iy < res; ++iy) {
    p[1] = cell.lo(1) + (iy + 0.5) * w1;
    for (int ix = 0; ix < res; ++ix) {
      p[0] = cell.lo(0) + (ix + 0.5) * w0;
      if (env.collision_free_uncounted(p)) ++free;
    }
  }
  return cell.measure() * static_cast<double>(free) /
         (static_cast<double>(res) * static_cast<double>(res));
}

}  // namespace testsupport
