#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace fss {

class RandomStream;

// A configuration-space point; length is the ambient dimension d >= 1.
using Point = std::vector<double>;

// Axis-aligned box [lo, hi] in d dimensions. lo[i] <= hi[i] on every axis;
// equal bounds are allowed and give a degenerate, measure-zero box.
class HyperRect {
 public:
  HyperRect(Point lo, Point hi);

  std::size_t dim() const noexcept { return lo_.size(); }
  const Point& lo() const noexcept { return lo_; }
  const Point& hi() const noexcept { return hi_; }
  double lo(std::size_t axis) const { return lo_[axis]; }
  double hi(std::size_t axis) const { return hi_[axis]; }
  double side(std::size_t axis) const { return hi_[axis] - lo_[axis]; }

  // Lebesgue measure: the product of the side lengths.
  double measure() const noexcept;

  // True when some side has zero length (measure zero).
  bool degenerate() const noexcept;

  // Closed containment on every axis.
  bool contains(const Point& x) const;

  // Cuts the box with the hyperplane through x orthogonal to `axis`. The low
  // half keeps [lo, x[axis]], the high half [x[axis], hi]; the halves
  // partition the box and their measures sum to measure() up to rounding.
  // Throws PointOutsideRect when x is not contained.
  std::pair<HyperRect, HyperRect> split(const Point& x, std::size_t axis) const;

  bool operator==(const HyperRect&) const = default;

 private:
  Point lo_;
  Point hi_;
};

std::optional<HyperRect> intersect(const HyperRect& a, const HyperRect& b);

// One point uniform over r, each axis independent and half-open: lo[i]
// inclusive, hi[i] exclusive, so repeated draws cannot land on the upper
// face. Degenerate axes yield lo[i]; callers that care should check
// r.degenerate().
Point sample_uniform(const HyperRect& r, RandomStream& rng);

}  // namespace fss
